// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/scenario/script.hpp"
#include "cotflow/workflow/trace.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cotflow::scenario {

/// Simulation part and (when present) post-processing part of a requirement.
std::pair<std::string, std::optional<std::string>> split_requirement(std::string_view text);

/// Injected behaviour for one synthetic run.
struct FailurePlan {
    struct Stage {
        /// Failed executions before the first success on first entry.
        int failures = 0;
        bool permanent = false;
    };

    Stage simulation;
    Stage command;
    Stage script;
    /// Tag of failed simulation runs (grid_fail, run_fail or diverged).
    OutcomeTag simulation_failure = OutcomeTag::RunFail;
    /// files_to_modify of each rejected verification round, in order.
    std::vector<std::vector<std::string>> rejections;
    /// Whether the produced results satisfy the requirement's oracle.
    bool oracle_ok = true;
    /// First reply of these roles is malformed and needs a reprompt.
    std::set<AgentRole> malformed_first;
};

struct BuildInput {
    std::string requirement;
    std::optional<workflow::OraclePredicate> oracle;
    FailurePlan plan;
    std::string description;
};

/// A scenario that answers every call the engine makes for `input` under
/// `cfg`, and nothing else.
ScenarioScript build_scenario(const BuildInput& input, const workflow::AblationConfig& cfg = {});

/// Adds the replies and executor outcomes needed by every configuration with
/// qdcot and icot levels at or below those of `cfg`. Existing entries win, so
/// a run under `cfg` itself consumes exactly what it did before.
void cover_reduced_configs(ScenarioScript& script, const BuildInput& input, const workflow::AblationConfig& cfg = {});

/// build_scenario followed by cover_reduced_configs.
ScenarioScript build_ablation_scenario(const BuildInput& input, const workflow::AblationConfig& cfg = {});

/// Deterministic token sizes per call (roughly 4:1 prompt to completion).
llm::Completion sized_reply(AgentRole role, Phase phase, std::optional<SubtaskKind> kind, int attempt,
                            std::string text);

}  // namespace cotflow::scenario
