// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/retrieval/embedding.hpp"
#include "cotflow/simd/kernels.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cotflow::retrieval {

struct CaseDocument {
    std::string id;
    std::filesystem::path source_path;
    std::string text;
    std::vector<double> vector;
};

/// A document before embedding.
struct CaseSource {
    std::string id;
    std::filesystem::path source_path;
    std::string text;
};

struct RetrievalHit {
    const CaseDocument* doc = nullptr;
    /// Cosine similarity of query and document vectors.
    double score = 0.0;
};

/// Scores closer than this are treated as equal and ordered by document id.
inline constexpr double kScoreTieEpsilon = 1e-12;

/// Exact (exhaustive) cosine-similarity index. Immutable once built, so
/// concurrent searches are safe.
class FlatIndex {
public:
    explicit FlatIndex(std::size_t dimension);

    /// Throws Error(DimensionMismatch) or Error(DuplicateId).
    void add(CaseDocument doc);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const std::vector<CaseDocument>& documents() const { return docs_; }

    /// Top-k hits by descending cosine; ties by ascending id. Uses
    /// `kernels` when given, the process-wide selection otherwise.
    std::vector<RetrievalHit> search(std::span<const double> query, std::size_t top_k,
                                     const simd::KernelTable* kernels = nullptr) const;

private:
    std::size_t dimension_;
    std::vector<CaseDocument> docs_;
    std::vector<double> rows_;   // docs_.size() x dimension_, row-major
    std::vector<double> norms_;  // L2 norm of each row
};

/// Embeds every source and builds an index. Throws Error(EmptyInput) for an
/// empty corpus.
FlatIndex index_corpus(const std::vector<CaseSource>& sources, const Embedder& embedder);

/// Embeds `query_text` and searches. Throws Error(EmptyIndex) on an empty
/// index and Error(DomainError) when top_k is zero.
std::vector<RetrievalHit> search(const FlatIndex& index, const Embedder& embedder,
                                 std::string_view query_text, std::size_t top_k);

inline constexpr int kIndexFormatVersion = 1;

/// JSON artifact with embedded format version, dimension and document count.
void save_index(const FlatIndex& index, const std::filesystem::path& path);
FlatIndex load_index(const std::filesystem::path& path);

}  // namespace cotflow::retrieval
