// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/bench/benchmark.hpp"
#include "cotflow/metrics/results_table.hpp"
#include "cotflow/scenario/builder.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cotflow::bench {

/// Per-task targets a synthetic scenario family is shaped after.
struct TaskProfile {
    std::string task_id;
    double executability = 7.0;
    double pass_rate = 1.0;  // fraction
    double sim_iterations = 0.0;
    double post_iterations = 0.0;
    double script_iterations = 0.0;
    /// Mean tokens per sample; families are rescaled to them when set.
    std::optional<double> prompt_tokens;
    std::optional<double> completion_tokens;
};

/// One profile per row; needs the three per-category iteration columns.
std::vector<TaskProfile> profiles_from_table(const metrics::ResultsTable& table);

struct SamplePlan {
    int expected_score = 7;
    scenario::FailurePlan plan;
    /// Iterations each kind should use under the full configuration.
    int sim_iterations = 0;
    int post_iterations = 0;
    int script_iterations = 0;
};

/// n sample plans under `cfg` (which should have every reviewer enabled):
/// round(pass_rate * n) flawless samples, the rest given failure scores whose
/// sum is as close to round(executability * n) as the iteration targets allow,
/// and round(mean * n) iterations per kind spread evenly over the samples that
/// reach that kind.
std::vector<SamplePlan> plan_samples(const TaskProfile& profile, int n, const workflow::AblationConfig& cfg = {});

/// Rescales the token counts of every reply so that, per direction, they sum
/// to exactly the given totals (largest-remainder rounding, ties by order).
/// A negative total leaves that direction alone.
void calibrate_tokens(std::vector<scenario::ScenarioScript>& scripts, std::int64_t prompt_total,
                      std::int64_t completion_total);

/// Writes <dir>/<task>/sNN.json for every task with a profile; returns the
/// number of files written. Tasks without a profile raise ConfigError.
std::size_t write_scenario_family(const std::vector<BenchTask>& tasks, const std::vector<TaskProfile>& profiles,
                                  int n, const std::filesystem::path& dir, const workflow::AblationConfig& cfg = {});

}  // namespace cotflow::bench
