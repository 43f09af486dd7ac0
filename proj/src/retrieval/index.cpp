// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/retrieval/index.hpp"

#include "cotflow/common.hpp"
#include "cotflow/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cotflow::retrieval {

FlatIndex::FlatIndex(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw Error(ErrorCode::DimensionMismatch, "index dimension must be positive");
}

void FlatIndex::add(CaseDocument doc) {
    if (doc.vector.size() != dimension_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "document '" + doc.id + "' has dimension " + std::to_string(doc.vector.size()) +
                        ", index expects " + std::to_string(dimension_));
    }
    for (const auto& existing : docs_) {
        if (existing.id == doc.id) throw Error(ErrorCode::DuplicateId, "duplicate document id '" + doc.id + "'");
    }
    rows_.insert(rows_.end(), doc.vector.begin(), doc.vector.end());
    norms_.push_back(std::sqrt(simd::scalar::dot(doc.vector.data(), doc.vector.data(), dimension_)));
    docs_.push_back(std::move(doc));
}

std::vector<RetrievalHit> FlatIndex::search(std::span<const double> query, std::size_t top_k,
                                            const simd::KernelTable* kernels) const {
    if (docs_.empty()) throw Error(ErrorCode::EmptyIndex, "search on an empty index");
    if (top_k == 0) throw Error(ErrorCode::DomainError, "top_k must be at least 1");
    if (query.size() != dimension_) {
        throw Error(ErrorCode::DimensionMismatch, "query dimension does not match the index");
    }
    const simd::KernelTable& k = kernels != nullptr ? *kernels : simd::active_kernels();

    std::vector<double> dots(docs_.size());
    k.dot_rows(query.data(), rows_.data(), dimension_, dots.data(), dots.size());
    const double query_norm = std::sqrt(simd::scalar::dot(query.data(), query.data(), dimension_));

    std::vector<double> scores(docs_.size(), 0.0);
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const double denom = query_norm * norms_[i];
        scores[i] = denom > 0.0 ? std::clamp(dots[i] / denom, -1.0, 1.0) : 0.0;
    }

    std::vector<std::size_t> order(docs_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto by_score = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (docs_[a].id != docs_[b].id) return docs_[a].id < docs_[b].id;
        return a < b;
    };
    std::sort(order.begin(), order.end(), by_score);

    // Summation order can split mathematically equal scores by a few ulps;
    // regroup such runs so the id rule decides.
    auto by_id = [&](std::size_t a, std::size_t b) {
        if (docs_[a].id != docs_[b].id) return docs_[a].id < docs_[b].id;
        return a < b;
    };
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i == order.size() || scores[order[i - 1]] - scores[order[i]] > kScoreTieEpsilon) {
            if (i - run_start > 1) {
                std::sort(order.begin() + static_cast<std::ptrdiff_t>(run_start),
                          order.begin() + static_cast<std::ptrdiff_t>(i), by_id);
            }
            run_start = i;
        }
    }

    const std::size_t count = std::min(top_k, order.size());
    std::vector<RetrievalHit> hits;
    hits.reserve(count);
    for (std::size_t i = 0; i < count; ++i) hits.push_back({&docs_[order[i]], scores[order[i]]});
    return hits;
}

FlatIndex index_corpus(const std::vector<CaseSource>& sources, const Embedder& embedder) {
    if (sources.empty()) throw Error(ErrorCode::EmptyInput, "corpus is empty");
    FlatIndex index(embedder.dimension());
    for (const auto& src : sources) {
        index.add(CaseDocument{src.id, src.source_path, src.text, embedder.embed(src.text)});
    }
    return index;
}

std::vector<RetrievalHit> search(const FlatIndex& index, const Embedder& embedder,
                                 std::string_view query_text, std::size_t top_k) {
    if (index.empty()) throw Error(ErrorCode::EmptyIndex, "search on an empty index");
    if (top_k == 0) throw Error(ErrorCode::DomainError, "top_k must be at least 1");
    const auto query = embedder.embed(query_text);
    return index.search(query, top_k);
}

void save_index(const FlatIndex& index, const std::filesystem::path& path) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : index.documents()) {
        docs.push_back({{"id", d.id}, {"source_path", d.source_path.generic_string()},
                        {"text", d.text}, {"vector", d.vector}});
    }
    const nlohmann::json doc = {
        {"format", "cotflow-index"},
        {"version", kIndexFormatVersion},
        {"dimension", index.dimension()},
        {"count", index.size()},
        {"documents", std::move(docs)},
    };
    write_text_file(path, doc.dump() + "\n");
}

FlatIndex load_index(const std::filesystem::path& path) {
    const auto doc = nlohmann::json::parse(read_text_file(path), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || doc.value("format", std::string()) != "cotflow-index") {
        throw Error(ErrorCode::SchemaError, path.string() + ": not a cotflow index");
    }
    if (doc.value("version", 0) != kIndexFormatVersion) {
        throw Error(ErrorCode::SchemaError, path.string() + ": unsupported index version");
    }
    FlatIndex index(doc.at("dimension").get<std::size_t>());
    for (const auto& d : doc.at("documents")) {
        index.add(CaseDocument{d.at("id").get<std::string>(),
                               std::filesystem::path(d.at("source_path").get<std::string>()),
                               d.at("text").get<std::string>(),
                               d.at("vector").get<std::vector<double>>()});
    }
    if (index.size() != doc.at("count").get<std::size_t>()) {
        throw Error(ErrorCode::SchemaError, path.string() + ": document count does not match header");
    }
    return index;
}

}  // namespace cotflow::retrieval
