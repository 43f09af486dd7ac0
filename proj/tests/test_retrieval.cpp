// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"
#include "support.hpp"

#include "cotflow/retrieval/corpus.hpp"
#include "cotflow/retrieval/embedding.hpp"
#include "cotflow/retrieval/index.hpp"
#include "cotflow/util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cotflow;
using namespace cotflow::retrieval;

namespace {

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

CaseDocument doc(std::string id, std::vector<double> v) { return {std::move(id), {}, "text of " + id, std::move(v)}; }

}  // namespace

TEST_CASE("tokenizer and hash") {
    CHECK(tokenize("Max yPlus, at t=0.5!") == std::vector<std::string>{"max", "yplus", "at", "t", "0", "5"});
    CHECK(tokenize("  ").empty());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("mock embedder") {
    const MockEmbedder e;
    CHECK(e.dimension() == 4096);
    CHECK(e.embed("pitzDaily simpleFoam") == e.embed("pitzDaily simpleFoam"));
    CHECK(e.embed("alpha beta") == e.embed("beta alpha"));
    for (const char* t : {"alpha", "a b c d e f", "pitzDaily RANS simulation with kEpsilon"}) {
        CHECK(std::abs(norm(e.embed(t)) - 1.0) <= 1e-9);
    }
    CHECK(norm(e.embed("!!!")) == 0.0);
    CHECK_ERROR_CODE(ErrorCode::DomainError, e.embed(""));

    // One token lands in exactly its hashed bucket.
    const auto v = e.embed("cavity");
    CHECK(v[fnv1a64("cavity") % 4096] == doctest::Approx(1.0));
    // repeated tokens are damped logarithmically
    const auto c = fnv1a64("cavity") % 4096, f = fnv1a64("flame") % 4096;
    REQUIRE(c != f);
    const auto w = e.embed("cavity flame cavity cavity");
    const double rep = 1.0 + std::log(3.0);
    CHECK(w[c] == doctest::Approx(rep / std::sqrt(rep * rep + 1.0)));
    CHECK(w[f] == doctest::Approx(1.0 / std::sqrt(rep * rep + 1.0)));
}

TEST_CASE("index construction") {
    const MockEmbedder e;
    const auto idx = index_corpus({{"a", {}, "pitzDaily"}, {"b", {}, "cavity"}, {"c", {}, "flame"}}, e);
    CHECK(idx.size() == 3);
    CHECK(idx.dimension() == 4096);
    CHECK_ERROR_CODE(ErrorCode::EmptyInput, index_corpus({}, e));
    CHECK_ERROR_CODE(ErrorCode::DuplicateId, index_corpus({{"a", {}, "x"}, {"a", {}, "y"}}, e));
    FlatIndex small(3);
    CHECK_ERROR_CODE(ErrorCode::DimensionMismatch, small.add(doc("x", {1, 2})));
    CHECK_ERROR_CODE(ErrorCode::EmptyIndex, search(small, e, "x", 1));
    small.add(doc("x", {1, 0, 0}));
}

TEST_CASE("search: self query, ranking oracle, ties") {
    const MockEmbedder e;
    const std::vector<CaseSource> src{{"pitz", {}, "pitzDaily simpleFoam kEpsilon inlet outlet"},
                                      {"cav", {}, "cavity icoFoam lid driven"},
                                      {"flame", {}, "counterFlowFlame reactingFoam T"}};
    const auto idx = index_corpus(src, e);
    const auto hits = search(idx, e, src[1].text, 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].doc->id == "cav");
    CHECK(std::abs(hits[0].score - 1.0) <= 1e-9);

    const std::string q = "pimpleFoam pitzDaily flame";
    std::vector<CaseDocument> docs = idx.documents();
    CHECK(oracle::same_ranking(search(idx, e, q, 3), oracle::brute_force(docs, e.embed(q), 3)));
    CHECK_ERROR_CODE(ErrorCode::DomainError, search(idx, e, q, 0));

    FlatIndex tied(2);
    tied.add(doc("zeta", {1, 1}));
    tied.add(doc("alpha", {2, 2}));
    tied.add(doc("mid", {1, 0}));
    const std::vector<double> query{1, 1};
    const auto th = tied.search(query, 3);
    REQUIRE(th.size() == 3);
    CHECK(th[0].doc->id == "alpha");
    CHECK(th[1].doc->id == "zeta");
    CHECK(th[2].doc->id == "mid");
    CHECK(tied.search(query, 10).size() == 3);
}

TEST_CASE("search is exact on random corpora for every kernel") {
    std::mt19937_64 rng(2026);
    const MockEmbedder e;
    for (int trial = 0; trial < 25; ++trial) {
        const auto src = oracle::random_corpus(rng, 1 + static_cast<std::size_t>(rng() % 300));
        const auto idx = index_corpus(src, e);
        const auto& query = src[rng() % src.size()].text;
        const auto qv = e.embed(query);
        const std::size_t k = 1 + rng() % 10;
        const auto want = oracle::brute_force(idx.documents(), qv, k);
        for (auto isa : {simd::Isa::Scalar, simd::Isa::Avx2, simd::Isa::Neon}) {
            if (!simd::is_supported(isa)) continue;
            const auto got = idx.search(qv, k, &simd::kernels_for(isa));
            CHECK(oracle::same_ranking(got, want));
            CHECK(std::abs(got[0].score - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("search is deterministic and index reload is lossless") {
    testing::TempDir dir;
    std::mt19937_64 rng(5);
    const MockEmbedder e;
    const auto src = oracle::random_corpus(rng, 60);
    const auto a = index_corpus(src, e);
    const auto b = index_corpus(src, e);
    save_index(a, dir / "idx.json");
    const auto c = load_index(dir / "idx.json");
    CHECK(c.size() == a.size());
    CHECK(c.dimension() == a.dimension());
    const std::string q = "pitzDaily yPlus wall";
    const auto ha = search(a, e, q, 5), hb = search(b, e, q, 5), hc = search(c, e, q, 5);
    for (std::size_t i = 0; i < ha.size(); ++i) {
        CHECK(ha[i].doc->id == hb[i].doc->id);
        CHECK(ha[i].doc->id == hc[i].doc->id);
        CHECK(ha[i].score == hb[i].score);
        CHECK(ha[i].score == hc[i].score);
    }
    write_text_file(dir / "bad.json", "{\"format\": \"other\"}");
    CHECK_ERROR_CODE(ErrorCode::SchemaError, load_index(dir / "bad.json"));
}

TEST_CASE("context stacking") {
    const CaseDocument d1{"one", {}, "first body\n", {}};
    const CaseDocument d2{"two", {}, "second body\n", {}};
    CHECK(stack_context({}, "user message") == "user message");
    const auto full = stack_context({{&d1, 0.9}, {&d2, 0.5}}, "msg");
    CHECK(full == context_header(d1) + "first body\n" + context_header(d2) + "second body\n" + "msg");
    CHECK(context_header(d1).find("one") != std::string::npos);

    const std::size_t budget = context_header(d1).size() + d1.text.size() + context_header(d2).size() + 3;
    const auto cut = stack_context({{&d1, 0.9}, {&d2, 0.5}}, "a long user message that is never cut", budget);
    CHECK(cut.find("first body\n") != std::string::npos);
    CHECK(cut.find("second body") == std::string::npos);
    CHECK(cut.find("sec") != std::string::npos);
    CHECK(ends_with(cut, "a long user message that is never cut"));
    CHECK(stack_context({{&d1, 0.9}}, "m", 0) == "m");
}

TEST_CASE("shipped corpus") {
    const auto entries = load_manifest(testing::data_dir() / "corpus" / "manifest.json");
    CHECK(entries.size() >= 5);
    for (const auto& e : entries) CHECK(e.path.is_absolute());
    const auto sources = read_corpus(entries);
    const auto pitz = std::find_if(sources.begin(), sources.end(), [](const auto& s) { return s.id == "pitzDaily"; });
    REQUIRE(pitz != sources.end());
    CHECK(pitz->text.find("// file: system/controlDict") != std::string::npos);

    const MockEmbedder e;
    const auto idx = index_corpus(sources, e);
    CHECK(search(idx, e, testing::kPitzYplus, 1)[0].doc->id == "pitzDaily");
    // A weak match still yields a hit; there is no similarity floor.
    CHECK(search(idx, e, "zzzz qqqq", 1).size() == 1);
}
