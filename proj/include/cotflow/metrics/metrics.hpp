// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/llm/ledger.hpp"
#include "cotflow/workflow/trace.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace cotflow::metrics {

/// Rubric score 0..7 of a finished trace.
int score_executability(const workflow::WorkflowTrace& trace);

/// n generated samples of which c are flawless, evaluated at k draws.
struct PassAtKSample {
    int n = 1;
    int c = 0;
    int k = 1;

    /// Throws Error(DomainError) unless 1 <= k <= n and 0 <= c <= n.
    void validate() const;
};

/// 1 - C(n-c, k) / C(n, k) via the running product of (n-c-i)/(n-i), exact
/// to rounding for n up to 10,000 and beyond.
double pass_at_k(const PassAtKSample& s);

/// The same value as a reduced fraction (numerator, denominator). Exact for
/// n <= 60; larger n raises Error(DomainError).
std::pair<std::uint64_t, std::uint64_t> pass_at_k_rational(const PassAtKSample& s);

/// Mean of per-problem pass@k; Error(EmptyInput) for an empty list.
double aggregate_pass_at_k(const std::vector<PassAtKSample>& samples);

struct PricingConfig {
    double prompt_rate = 2.5;       // per 1M prompt tokens
    double completion_rate = 10.0;  // per 1M completion tokens

    void validate() const;
};

double cost(double prompt_tokens, double completion_tokens, const PricingConfig& pricing);
double cost(const llm::TokenLedger& ledger, const PricingConfig& pricing);

/// Phase x direction totals of a ledger.
struct TokenCategories {
    llm::TokenTotals non_iteration;
    llm::TokenTotals iteration;

    std::int64_t prompt() const { return non_iteration.prompt + iteration.prompt; }
    std::int64_t completion() const { return non_iteration.completion + iteration.completion; }
    std::int64_t total() const { return prompt() + completion(); }

    bool operator==(const TokenCategories&) const = default;
};

TokenCategories categorize_tokens(const llm::TokenLedger& ledger);

enum class ScalingAxis { NonIterationTokens, IterationTokens, TotalTokens };

std::string_view to_string(ScalingAxis axis);

/// executability = a + b * ln(tokens)
struct ScalingFit {
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
    ScalingAxis axis = ScalingAxis::TotalTokens;
    std::size_t points = 0;

    double predict(double tokens) const;
};

/// Least squares over (token_total, executability) points. Needs at least
/// two distinct, strictly positive token totals (Error(DegenerateInput)).
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, ScalingAxis axis);

}  // namespace cotflow::metrics
