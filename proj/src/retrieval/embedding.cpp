// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/retrieval/embedding.hpp"

#include "cotflow/common.hpp"
#include "cotflow/simd/kernels.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>

namespace cotflow::retrieval {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char ch : text) {
        const auto u = static_cast<unsigned char>(ch);
        if (u < 128 && std::isalnum(u)) {
            current.push_back(static_cast<char>(std::tolower(u)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char ch : bytes) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::vector<double> MockEmbedder::embed(std::string_view text) const {
    if (text.empty()) throw Error(ErrorCode::DomainError, "cannot embed empty text");
    std::vector<double> v(kMockDimension, 0.0);
    for (const auto& token : tokenize(text)) v[fnv1a64(token) % kMockDimension] += 1.0;
    for (double& x : v) x = x > 0.0 ? 1.0 + std::log(x) : 0.0;
    const double norm = std::sqrt(simd::scalar::dot(v.data(), v.data(), v.size()));
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    }
    return v;
}

HttpEmbedder::HttpEmbedder(llm::HttpEndpoint endpoint, std::string model, std::size_t dimension,
                           llm::RetryPolicy policy)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      dimension_(dimension),
      policy_(std::move(policy)) {}

std::vector<double> HttpEmbedder::embed(std::string_view text) const {
    if (text.empty()) throw Error(ErrorCode::DomainError, "cannot embed empty text");
    const nlohmann::json request = {{"model", model_}, {"input", std::string(text)}};
    const std::string body = llm::post_json(endpoint_, "/v1/embeddings", request.dump(), policy_);
    const auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() ||
        doc["data"].empty() || !doc["data"][0].contains("embedding")) {
        throw Error(ErrorCode::BackendRefusal, "embedding response unusable: " + body);
    }
    auto v = doc["data"][0]["embedding"].get<std::vector<double>>();
    if (v.size() != dimension_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "embedding has " + std::to_string(v.size()) + " components, expected " +
                        std::to_string(dimension_));
    }
    return v;
}

}  // namespace cotflow::retrieval
