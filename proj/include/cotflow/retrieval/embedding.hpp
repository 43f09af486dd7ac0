// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/llm/http_transport.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::retrieval {

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    /// Throws Error(DomainError) on empty text.
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Lower-cased maximal runs of ASCII letters and digits.
std::vector<std::string> tokenize(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

inline constexpr std::size_t kMockDimension = 4096;

/// Hashed bag of words: bucket fnv1a64(token) % 4096 holds 1 + ln(count) of
/// the tokens hashed there, the result is L2-normalised. Text without tokens maps to the zero vector.
class MockEmbedder final : public Embedder {
public:
    std::size_t dimension() const override { return kMockDimension; }
    std::vector<double> embed(std::string_view text) const override;
};

/// Client for an OpenAI-style /v1/embeddings endpoint.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(llm::HttpEndpoint endpoint, std::string model, std::size_t dimension,
                 llm::RetryPolicy policy = {});

    std::size_t dimension() const override { return dimension_; }
    std::vector<double> embed(std::string_view text) const override;

private:
    llm::HttpEndpoint endpoint_;
    std::string model_;
    std::size_t dimension_;
    llm::RetryPolicy policy_;
};

}  // namespace cotflow::retrieval
