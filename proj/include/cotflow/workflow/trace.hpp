// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/common.hpp"
#include "cotflow/agents/wire.hpp"
#include "cotflow/llm/ledger.hpp"
#include "cotflow/sandbox/run_record.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::workflow {

struct AblationConfig {
    int qdcot_level = 2;  // 0..2
    int icot_level = 3;   // 0..3
    int max_iterations = 10;
    int max_verification_rounds = 3;

    /// Throws Error(ConfigError).
    void validate() const;

    bool operator==(const AblationConfig&) const = default;
};

/// Automated stand-in for the final human check of a run's results.
struct OraclePredicate {
    enum class Kind { ScalarInRange, FileNonEmpty, SeriesNonEmpty };

    Kind kind = Kind::ScalarInRange;
    /// Variable name printed by the script (ScalarInRange) or a path
    /// relative to the working directory.
    std::string target;
    double lo = 0.0;
    double hi = 0.0;

    /// Throws Error(SchemaError) for non-finite or inverted bounds and an
    /// empty target.
    void validate() const;
};

std::string_view to_string(OraclePredicate::Kind kind);
std::optional<OraclePredicate::Kind> parse_oracle_kind(std::string_view text);

/// Last "<name> = <number>" (or "<name>: <number>") in `text`.
std::optional<double> find_scalar(std::string_view text, std::string_view name);

bool evaluate_oracle(const OraclePredicate& oracle, const std::filesystem::path& workdir,
                     std::string_view script_output);

nlohmann::json oracle_to_json(const OraclePredicate& oracle);
/// Throws Error(SchemaError) naming `where`.
OraclePredicate oracle_from_json(const nlohmann::json& j, const std::string& where);

struct Requirement {
    std::string id;
    std::string text;
    std::optional<OraclePredicate> oracle;
};

enum class SubtaskStatus { Pending, Succeeded, Failed };

std::string_view to_string(SubtaskStatus status);

struct Subtask {
    SubtaskKind kind = SubtaskKind::SimulationRun;
    std::string description;
    SubtaskStatus status = SubtaskStatus::Pending;
    /// Review and rewrite cycles charged to this subtask so far.
    int attempts = 0;
};

struct SubtaskOutcome {
    SubtaskKind kind = SubtaskKind::SimulationRun;
    bool success = false;
    /// Review, rewrite and rerun cycles in this loop only.
    int iterations_used = 0;
    bool budget_exhausted = false;
    sandbox::RunRecord final_run;
};

inline constexpr std::size_t kMilestoneCount = 8;
using Milestones = std::array<bool, kMilestoneCount>;

inline constexpr std::array<std::string_view, kMilestoneCount> kMilestoneNames{
    "grid_generated", "runnable",        "converged",       "reached_end_time",
    "command_ok",     "script_ok",       "verifier_passed", "oracle_passed"};

/// Evidence available for the rubric at one point of a run.
struct MilestoneInputs {
    std::optional<OutcomeTag> simulation_tag;
    /// Whether the Architect asked for post-processing at all.
    bool postprocessing_requested = false;
    std::optional<bool> command_ok;  // empty when the subtask was not scheduled
    std::optional<bool> script_ok;
    bool verifier_passed = false;
    bool oracle_passed = false;
};

/// Raw rungs forced into a ladder: a rung holds only if all earlier rungs do.
Milestones compute_milestones(const MilestoneInputs& in);

/// Rubric score 0..7 of a ladder. The converged and endTime rungs are both
/// decided by the same completed tag, so they count as one step.
int ladder_score(const Milestones& milestones);

struct AbortInfo {
    ErrorCode code = ErrorCode::IoError;
    std::string message;
};

/// Complete record of one requirement's run.
struct WorkflowTrace {
    std::string run_id;
    std::string requirement_id;
    AblationConfig config;
    std::string seed_case;  // id of the case copied into the working directory
    std::vector<agents::PlannedTask> tasks;
    std::vector<Subtask> subtasks;
    std::vector<SubtaskOutcome> outcomes;  // every ICOT loop, in order
    Milestones milestones{};
    std::map<SubtaskKind, int> iterations;
    llm::TokenLedger ledger;
    std::vector<std::string> artifacts;
    int verification_rounds = 0;
    std::optional<agents::Verdict> last_verdict;
    std::optional<SubtaskKind> budget_exhausted;
    std::optional<AbortInfo> abort;

    int score() const { return ladder_score(milestones); }
    int total_iterations() const;
};

}  // namespace cotflow::workflow
