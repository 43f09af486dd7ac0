// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/common.hpp"
#include "cotflow/llm/backend.hpp"
#include "cotflow/llm/ledger.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>

namespace cotflow::scenario {

/// Canned result of one execution in simulated mode.
struct ScriptedOutcome {
    OutcomeTag tag = OutcomeTag::Completed;
    std::string stdout_text;
    std::string stderr_text;
    double duration_s = 0.0;
    /// Files the run "produces" in the working directory (relative path -> content).
    std::map<std::string, std::string> files;
};

using ExecutorKey = std::pair<SubtaskKind, int>;

/// Deterministic fixture dictating every LLM reply and execution outcome of
/// one run. Lookups outside the tables are errors.
struct ScenarioScript {
    std::string description;
    std::map<llm::CallKey, llm::Completion> responses;
    std::map<ExecutorKey, ScriptedOutcome> executor_outcomes;
};

inline constexpr int kScenarioFormatVersion = 1;

/// Parses the JSON scenario format; throws Error(SchemaError) with a field
/// path on malformed input.
ScenarioScript parse_scenario(const std::string& text);
ScenarioScript load_scenario(const std::filesystem::path& path);

/// Canonical JSON rendering (stable key order, two-space indent).
std::string dump_scenario(const ScenarioScript& script);
void save_scenario(const ScenarioScript& script, const std::filesystem::path& path);

/// Sum of the token counts of every scripted response.
llm::TokenTotals declared_totals(const ScenarioScript& script);

}  // namespace cotflow::scenario
