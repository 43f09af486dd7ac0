// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/common.hpp"

#include <array>
#include <utility>

namespace cotflow {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view text) {
    for (const auto& [value, name] : table) {
        if (name == text) return value;
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::array<std::pair<TaskKind, std::string_view>, 2> kTaskKinds{{
    {TaskKind::Simulation, "Simulation"},
    {TaskKind::Postprocessing, "Postprocessing"},
}};

constexpr std::array<std::pair<SubtaskKind, std::string_view>, 3> kSubtaskKinds{{
    {SubtaskKind::SimulationRun, "SimulationRun"},
    {SubtaskKind::PostprocessCommand, "PostprocessCommand"},
    {SubtaskKind::PostprocessScript, "PostprocessScript"},
}};

constexpr std::array<std::pair<AgentRole, std::string_view>, 4> kRoles{{
    {AgentRole::Architect, "Architect"},
    {AgentRole::InputWriter, "InputWriter"},
    {AgentRole::Reviewer, "Reviewer"},
    {AgentRole::Verifier, "Verifier"},
}};

constexpr std::array<std::pair<Phase, std::string_view>, 2> kPhases{{
    {Phase::NonIteration, "non_iteration"},
    {Phase::Iteration, "iteration"},
}};

constexpr std::array<std::pair<OutcomeTag, std::string_view>, 8> kTags{{
    {OutcomeTag::GridFail, "grid_fail"},
    {OutcomeTag::RunFail, "run_fail"},
    {OutcomeTag::Diverged, "diverged"},
    {OutcomeTag::Completed, "completed"},
    {OutcomeTag::CommandOk, "command_ok"},
    {OutcomeTag::CommandFail, "command_fail"},
    {OutcomeTag::ScriptOk, "script_ok"},
    {OutcomeTag::ScriptFail, "script_fail"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ArchitectParseError: return "ArchitectParseError";
        case ErrorCode::ReviewerParseError: return "ReviewerParseError";
        case ErrorCode::VerifierParseError: return "VerifierParseError";
        case ErrorCode::EmptyGeneration: return "EmptyGeneration";
        case ErrorCode::ExecutorFault: return "ExecutorFault";
        case ErrorCode::UnmappableFiles: return "UnmappableFiles";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::BackendRefusal: return "BackendRefusal";
        case ErrorCode::MissingScenarioEntry: return "MissingScenarioEntry";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::TemplateError: return "TemplateError";
        case ErrorCode::PathEscape: return "PathEscape";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

std::string_view to_string(TaskKind kind) { return name_of(kTaskKinds, kind); }
std::string_view to_string(SubtaskKind kind) { return name_of(kSubtaskKinds, kind); }
std::string_view to_string(AgentRole role) { return name_of(kRoles, role); }
std::string_view to_string(Phase phase) { return name_of(kPhases, phase); }
std::string_view to_string(OutcomeTag tag) { return name_of(kTags, tag); }

std::optional<TaskKind> parse_task_kind(std::string_view text) { return lookup(kTaskKinds, text); }
std::optional<SubtaskKind> parse_subtask_kind(std::string_view text) {
    return lookup(kSubtaskKinds, text);
}
std::optional<AgentRole> parse_agent_role(std::string_view text) { return lookup(kRoles, text); }
std::optional<Phase> parse_phase(std::string_view text) { return lookup(kPhases, text); }
std::optional<OutcomeTag> parse_outcome_tag(std::string_view text) { return lookup(kTags, text); }

bool tag_matches_kind(OutcomeTag tag, SubtaskKind kind) {
    switch (kind) {
        case SubtaskKind::SimulationRun:
            return tag == OutcomeTag::GridFail || tag == OutcomeTag::RunFail ||
                   tag == OutcomeTag::Diverged || tag == OutcomeTag::Completed;
        case SubtaskKind::PostprocessCommand:
            return tag == OutcomeTag::CommandOk || tag == OutcomeTag::CommandFail;
        case SubtaskKind::PostprocessScript:
            return tag == OutcomeTag::ScriptOk || tag == OutcomeTag::ScriptFail;
    }
    return false;
}

}  // namespace cotflow
