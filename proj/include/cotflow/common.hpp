// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cotflow {

/// Error categories surfaced by the library. Every failure the workflow can
/// report is one of these; callers switch on the code, not the message.
enum class ErrorCode {
    ArchitectParseError,
    ReviewerParseError,
    VerifierParseError,
    EmptyGeneration,
    ExecutorFault,
    UnmappableFiles,
    TransportError,
    BackendRefusal,
    MissingScenarioEntry,
    DimensionMismatch,
    DuplicateId,
    EmptyIndex,
    DomainError,
    EmptyInput,
    DegenerateInput,
    SchemaError,
    TemplateError,
    PathEscape,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class TaskKind { Simulation, Postprocessing };

enum class SubtaskKind { SimulationRun, PostprocessCommand, PostprocessScript };

inline constexpr SubtaskKind kAllSubtaskKinds[] = {
    SubtaskKind::SimulationRun, SubtaskKind::PostprocessCommand, SubtaskKind::PostprocessScript};

enum class AgentRole { Architect, InputWriter, Reviewer, Verifier };

enum class Phase { NonIteration, Iteration };

/// Execution outcome tags. The first four classify simulation runs, the rest
/// classify post-processing runs.
enum class OutcomeTag {
    GridFail,
    RunFail,
    Diverged,
    Completed,
    CommandOk,
    CommandFail,
    ScriptOk,
    ScriptFail,
};

std::string_view to_string(TaskKind kind);
std::string_view to_string(SubtaskKind kind);
std::string_view to_string(AgentRole role);
std::string_view to_string(Phase phase);
std::string_view to_string(OutcomeTag tag);

std::optional<TaskKind> parse_task_kind(std::string_view text);
std::optional<SubtaskKind> parse_subtask_kind(std::string_view text);
std::optional<AgentRole> parse_agent_role(std::string_view text);
std::optional<Phase> parse_phase(std::string_view text);
std::optional<OutcomeTag> parse_outcome_tag(std::string_view text);

/// True for the tags that correspond to a zero exit code.
constexpr bool is_success_tag(OutcomeTag tag) {
    return tag == OutcomeTag::Completed || tag == OutcomeTag::CommandOk ||
           tag == OutcomeTag::ScriptOk;
}

/// Whether `tag` is a legal classification for a run of `kind`.
bool tag_matches_kind(OutcomeTag tag, SubtaskKind kind);

/// Placeholder used in keys and logs for calls that are not tied to a subtask
/// (architect planning, verification).
inline constexpr std::string_view kNoSubtask = "-";

}  // namespace cotflow
