// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/bench/benchmark.hpp"
#include "cotflow/metrics/metrics.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::bench {

struct GridPoint {
    int qdcot = 2;
    int icot = 3;

    auto operator<=>(const GridPoint&) const = default;
};

/// "q:i,q:i,..." (e.g. "2:0,2:1,2:2,2:3"); Error(ConfigError) on bad syntax,
/// out-of-range levels or duplicates.
std::vector<GridPoint> parse_grid(std::string_view text);

/// {(2,0),(2,1),(2,2),(2,3)} followed by {(0,3),(1,3)}.
std::vector<GridPoint> default_grid();

struct AblationPoint {
    GridPoint point;
    double executability = 0.0;
    double pass_at_k = 0.0;
    double non_iteration_tokens = 0.0;
    double iteration_tokens = 0.0;
    double cost = 0.0;
    std::vector<BenchResult> results;

    double total_tokens() const { return non_iteration_tokens + iteration_tokens; }
};

struct SweepFit {
    std::string label;  // "qdcot" or "icot"
    std::vector<GridPoint> points;
    bool nondecreasing = true;
    std::optional<metrics::ScalingFit> fit;
    std::string note;  // why there is no fit
};

struct AblationReport {
    std::vector<AblationPoint> points;  // grid order
    std::vector<SweepFit> sweeps;
};

/// One benchmark pass per grid point under <out>/ablation/qXiY, every point
/// replaying the same scenarios. Sweeps: the qdcot levels sharing the largest
/// icot level in the grid, fitted against non-iteration tokens, and the icot
/// levels sharing the largest qdcot level, fitted against iteration tokens
/// (points without iteration tokens are left out of that fit).
AblationReport run_ablation(const std::vector<BenchTask>& tasks, const std::vector<GridPoint>& grid,
                            const BenchOptions& base, const BenchEnv& env);

std::string render_ablation(const AblationReport& report, const BenchOptions& base);
std::string ablation_points_csv(const AblationReport& report);

/// Writes ablation.txt and ablation_points.csv under `dir`; returns the
/// report path.
std::filesystem::path write_ablation(const AblationReport& report, const BenchOptions& base,
                                     const std::filesystem::path& dir);

}  // namespace cotflow::bench
