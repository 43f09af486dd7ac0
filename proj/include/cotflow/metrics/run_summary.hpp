// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/metrics/metrics.hpp"
#include "cotflow/workflow/trace.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace cotflow::metrics {

/// What scoring needs from one run, as carried by results stores and trace logs.
struct RunSummary {
    std::string run_id;
    std::string requirement_id;
    int qdcot_level = 2;
    int icot_level = 3;
    int score = 0;
    workflow::Milestones milestones{};
    std::map<SubtaskKind, int> iterations;
    TokenCategories tokens;
    int verification_rounds = 0;
    std::size_t ledger_entries = 0;
    std::optional<std::string> abort_code;

    int total_iterations() const;
    bool flawless() const { return score == 7; }

    bool operator==(const RunSummary&) const = default;
};

RunSummary summarize_trace(const workflow::WorkflowTrace& trace);

nlohmann::json to_json(const RunSummary& summary);
/// Throws Error(SchemaError) naming `where`.
RunSummary run_summary_from_json(const nlohmann::json& j, const std::string& where);

/// Reads a run's trace log. The per-call token records are summed again and
/// must agree with the closing summary record (Error(SchemaError) if not).
RunSummary read_run_summary(const std::filesystem::path& trace_log);

}  // namespace cotflow::metrics
