// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/sandbox/process.hpp"
#include "cotflow/sandbox/run_record.hpp"
#include "cotflow/scenario/script.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::sandbox {

/// The Runner. Both modes hand the workflow the same RunRecord shape with
/// `outcome_tag` always set.
class Executor {
public:
    virtual ~Executor() = default;

    /// `attempt` counts earlier executions of `kind` in the same run.
    virtual RunRecord run(SubtaskKind kind, const std::filesystem::path& workdir, int attempt) = 0;
};

/// Returns the scripted outcome for (kind, attempt) verbatim; the exit code
/// is 0 exactly for completed/command_ok/script_ok. Throws
/// Error(MissingScenarioEntry) for unlisted keys.
RunRecord simulate(SubtaskKind kind, int attempt, const scenario::ScenarioScript& script);

class SimulatedExecutor final : public Executor {
public:
    explicit SimulatedExecutor(const scenario::ScenarioScript& script) : script_(script) {}

    /// simulate(), after writing the outcome's declared files into `workdir`.
    RunRecord run(SubtaskKind kind, const std::filesystem::path& workdir, int attempt) override;

private:
    const scenario::ScenarioScript& script_;
};

/// What the live classifier can learn about a case after a run.
struct CaseProbe {
    std::optional<std::string> mesh_log;
    std::optional<std::string> solver_log;
    std::optional<double> end_time;
};

struct OutcomeRules {
    /// ECMAScript regexes; a match in the solver log means divergence.
    std::vector<std::string> divergence_patterns{
        "Floating point exception", "FOAM FATAL", "\\bnan\\b", "sigFpe"};
    /// Lines (trimmed) that mark a solver that ran to completion.
    std::vector<std::string> completion_markers{"End"};
    /// Files probed for a meshing log, in order.
    std::vector<std::string> mesh_logs{"log.blockMesh", "log.snappyHexMesh"};
};

/// Value of the latest "Time = <t>" line.
std::optional<double> final_time(std::string_view log);

/// `endTime` entry of a controlDict.
std::optional<double> parse_end_time(std::string_view control_dict);

/// Reads system/controlDict and the mesh and solver logs from a case
/// directory. The solver log falls back to the record's stdout.
CaseProbe probe_case(const std::filesystem::path& workdir, const RunRecord& record,
                     const OutcomeRules& rules = {});

/// Live-mode classification. Ambiguity resolves to the most pessimistic tag
/// that the evidence allows.
OutcomeTag derive_outcome(const RunRecord& record, SubtaskKind kind, const CaseProbe& probe,
                          const OutcomeRules& rules = {});

struct LiveCommands {
    std::string simulation = "bash ./Allrun";
    std::string postprocess_command = "bash ./postprocessing_command.sh";
    std::string postprocess_script = "python3 ./postprocessing_python.py";

    const std::string& for_kind(SubtaskKind kind) const;
};

class LiveExecutor final : public Executor {
public:
    LiveExecutor(LiveCommands commands = {}, ExecOptions options = {}, OutcomeRules rules = {})
        : commands_(std::move(commands)), options_(options), rules_(std::move(rules)) {}

    RunRecord run(SubtaskKind kind, const std::filesystem::path& workdir, int attempt) override;

private:
    LiveCommands commands_;
    ExecOptions options_;
    OutcomeRules rules_;
};

}  // namespace cotflow::sandbox
