// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::metrics {

/// One per-task row of averaged results, laid out like the published tables.
/// Pass@1 is a percentage.
struct TaskRow {
    std::string task_id;
    std::string sim_case;
    std::string post_task;
    double executability = 0.0;
    double tokens = 0.0;
    double iterations = 0.0;
    double pass_at_1 = 0.0;
    std::optional<double> sim_iterations;
    std::optional<double> post_iterations;
    std::optional<double> script_iterations;
    std::optional<double> prompt_tokens;
    std::optional<double> completion_tokens;
};

struct ResultsTable {
    std::vector<TaskRow> rows;
    /// The table's own "Average" row, when it has one.
    std::optional<TaskRow> reported_average;
};

/// Comma-separated text with a header naming at least task_id,
/// executability, tokens, iterations and pass_at_1; optional columns are
/// sim_case, post_task, sim_iterations, post_iterations, script_iterations,
/// prompt_tokens and completion_tokens. A row whose task_id is "Average"
/// becomes reported_average. Throws Error(SchemaError) with line numbers.
ResultsTable parse_results_csv(std::string_view text);
ResultsTable load_results_csv(const std::filesystem::path& path);

/// Arithmetic mean of every column (optional columns only when all rows have them).
/// Throws Error(EmptyInput) for a table without rows.
TaskRow column_means(const ResultsTable& table);

struct CrossCheckTolerances {
    double executability = 0.05;
    double pass_at_1 = 0.1;
    double tokens = 0.5;
    double iterations = 0.05;
    double category_iterations = 0.05;
    double direction_tokens = 0.5;
    /// Also hold every single row to the token and iteration identities.
    bool per_row = false;
};

struct Finding {
    std::string check;
    std::string row;  // task id, "Average" or "mean"
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;

    std::string describe() const;
};

/// Column means against the reported Average row, then the identities
/// tokens = prompt + completion and iterations = sum of the three
/// categories on the averages (reported values where present).
std::vector<Finding> cross_check(const ResultsTable& table, const CrossCheckTolerances& tol = {});

}  // namespace cotflow::metrics
