// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace cotflow::metrics {

int score_executability(const workflow::WorkflowTrace& trace) { return workflow::ladder_score(trace.milestones); }

void PassAtKSample::validate() const {
    if (n < 1) throw Error(ErrorCode::DomainError, "pass@k needs n >= 1");
    if (c < 0 || c > n) throw Error(ErrorCode::DomainError, "pass@k needs 0 <= c <= n");
    if (k < 1 || k > n) throw Error(ErrorCode::DomainError, "pass@k needs 1 <= k <= n");
}

double pass_at_k(const PassAtKSample& s) {
    s.validate();
    if (s.n - s.c < s.k) return 1.0;
    double miss = 1.0;
    for (int i = 0; i < s.k; ++i) {
        miss *= static_cast<double>(s.n - s.c - i) / static_cast<double>(s.n - i);
    }
    return 1.0 - miss;
}

namespace {

__extension__ typedef unsigned __int128 u128;

u128 binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (int i = 0; i < k; ++i) r = r * static_cast<u128>(n - i) / static_cast<u128>(i + 1);
    return r;
}

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> pass_at_k_rational(const PassAtKSample& s) {
    s.validate();
    if (s.n > 60) throw Error(ErrorCode::DomainError, "exact pass@k is limited to n <= 60");
    const u128 all = binomial(s.n, s.k);
    const u128 misses = binomial(s.n - s.c, s.k);
    u128 num = all - misses;
    u128 den = all;
    const u128 g = num == 0 ? den : gcd128(num, den);
    num /= g;
    den /= g;
    return {static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
}

double aggregate_pass_at_k(const std::vector<PassAtKSample>& samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no pass@k samples");
    double sum = 0.0;
    for (const auto& s : samples) sum += pass_at_k(s);
    return sum / static_cast<double>(samples.size());
}

void PricingConfig::validate() const {
    if (!(prompt_rate >= 0.0) || !(completion_rate >= 0.0) || !std::isfinite(prompt_rate) ||
        !std::isfinite(completion_rate)) {
        throw Error(ErrorCode::ConfigError, "pricing rates must be finite and non-negative");
    }
}

double cost(double prompt_tokens, double completion_tokens, const PricingConfig& pricing) {
    return prompt_tokens * pricing.prompt_rate / 1e6 + completion_tokens * pricing.completion_rate / 1e6;
}

double cost(const llm::TokenLedger& ledger, const PricingConfig& pricing) {
    const auto t = ledger.totals();
    return cost(static_cast<double>(t.prompt), static_cast<double>(t.completion), pricing);
}

TokenCategories categorize_tokens(const llm::TokenLedger& ledger) {
    TokenCategories out;
    for (const auto& e : ledger.entries()) {
        auto& bucket = e.phase == Phase::Iteration ? out.iteration : out.non_iteration;
        bucket.prompt += e.prompt_tokens;
        bucket.completion += e.completion_tokens;
    }
    return out;
}

std::string_view to_string(ScalingAxis axis) {
    switch (axis) {
        case ScalingAxis::NonIterationTokens: return "non_iteration_tokens";
        case ScalingAxis::IterationTokens: return "iteration_tokens";
        case ScalingAxis::TotalTokens: return "total_tokens";
    }
    return "?";
}

double ScalingFit::predict(double tokens) const { return a + b * std::log(tokens); }

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, ScalingAxis axis) {
    std::set<double> distinct;
    for (const auto& [t, y] : points) {
        if (!(t > 0.0) || !std::isfinite(t) || !std::isfinite(y)) {
            throw Error(ErrorCode::DegenerateInput, "token totals must be positive and finite");
        }
        distinct.insert(t);
    }
    if (distinct.size() < 2) throw Error(ErrorCode::DegenerateInput, "need two distinct token totals");

    const double n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [t, y] : points) {
        mx += std::log(t);
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [t, y] : points) {
        const double dx = std::log(t) - mx;
        const double dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ScalingFit fit;
    fit.axis = axis;
    fit.points = points.size();
    fit.b = sxy / sxx;
    fit.a = my - fit.b * mx;
    double ss_res = 0.0;
    for (const auto& [t, y] : points) {
        const double r = y - fit.predict(t);
        ss_res += r * r;
    }
    fit.r2 = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return fit;
}

}  // namespace cotflow::metrics
