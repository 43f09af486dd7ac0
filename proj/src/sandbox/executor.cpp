// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/sandbox/executor.hpp"

#include "cotflow/util.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>

namespace cotflow::sandbox {

namespace {

std::optional<std::string> read_if_exists(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
    return read_text_file(path);
}

std::optional<double> to_double(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool has_fatal_error(std::string_view log) {
    return log.find("FOAM FATAL") != std::string_view::npos;
}

bool any_match(std::string_view log, const std::vector<std::string>& patterns) {
    for (const auto& p : patterns) {
        const std::regex re(p, std::regex::ECMAScript | std::regex::icase);
        if (std::regex_search(log.begin(), log.end(), re)) return true;
    }
    return false;
}

bool has_marker_line(std::string_view log, const std::vector<std::string>& markers) {
    for (const auto& line : split(log, '\n')) {
        const auto t = trim(line);
        for (const auto& m : markers) {
            if (t == m) return true;
        }
    }
    return false;
}

std::optional<std::string> application_name(std::string_view control_dict) {
    static const std::regex re(R"((^|\n)\s*application\s+([A-Za-z0-9_]+)\s*;)");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(control_dict.begin(), control_dict.end(), m, re)) return m[2].str();
    return std::nullopt;
}

}  // namespace

RunRecord simulate(SubtaskKind kind, int attempt, const scenario::ScenarioScript& script) {
    auto it = script.executor_outcomes.find({kind, attempt});
    if (it == script.executor_outcomes.end()) {
        throw Error(ErrorCode::MissingScenarioEntry, "no scripted outcome for " +
                                                         std::string(to_string(kind)) + "/" +
                                                         std::to_string(attempt));
    }
    const scenario::ScriptedOutcome& o = it->second;
    RunRecord record;
    record.command = "simulated:" + std::string(to_string(kind)) + "#" + std::to_string(attempt);
    record.exit_code = is_success_tag(o.tag) ? 0 : 1;
    record.stdout_text = o.stdout_text;
    record.stderr_text = o.stderr_text;
    record.duration_s = o.duration_s;
    record.outcome_tag = o.tag;
    return record;
}

RunRecord SimulatedExecutor::run(SubtaskKind kind, const std::filesystem::path& workdir, int attempt) {
    RunRecord record = simulate(kind, attempt, script_);
    const auto& outcome = script_.executor_outcomes.at({kind, attempt});
    for (const auto& [path, content] : outcome.files) write_inside(workdir, path, content);
    return record;
}

std::optional<double> final_time(std::string_view log) {
    static const std::regex re(R"(^\s*Time = ([-+0-9.eE]+))");
    std::optional<double> last;
    for (const auto& line : split(log, '\n')) {
        std::smatch m;
        if (std::regex_search(line, m, re)) {
            if (auto v = to_double(m[1].str())) last = v;
        }
    }
    return last;
}

std::optional<double> parse_end_time(std::string_view control_dict) {
    static const std::regex re(R"((^|\n)\s*endTime\s+([-+0-9.eE]+)\s*;)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(control_dict.begin(), control_dict.end(), m, re)) return std::nullopt;
    return to_double(m[2].str());
}

CaseProbe probe_case(const std::filesystem::path& workdir, const RunRecord& record,
                     const OutcomeRules& rules) {
    CaseProbe probe;
    for (const auto& name : rules.mesh_logs) {
        if (auto log = read_if_exists(workdir / name)) {
            probe.mesh_log = std::move(log);
            break;
        }
    }
    if (auto dict = read_if_exists(workdir / "system" / "controlDict")) {
        probe.end_time = parse_end_time(*dict);
        if (auto app = application_name(*dict)) probe.solver_log = read_if_exists(workdir / ("log." + *app));
    }
    if (!probe.solver_log && !record.stdout_text.empty()) probe.solver_log = record.stdout_text;
    return probe;
}

OutcomeTag derive_outcome(const RunRecord& record, SubtaskKind kind, const CaseProbe& probe,
                          const OutcomeRules& rules) {
    const bool ok = record.exit_code == 0 && !record.timed_out;
    if (kind == SubtaskKind::PostprocessCommand) return ok ? OutcomeTag::CommandOk : OutcomeTag::CommandFail;
    if (kind == SubtaskKind::PostprocessScript) return ok ? OutcomeTag::ScriptOk : OutcomeTag::ScriptFail;

    if (record.timed_out) return OutcomeTag::RunFail;
    if (probe.mesh_log && has_fatal_error(*probe.mesh_log)) return OutcomeTag::GridFail;

    const bool stepped = probe.solver_log && final_time(*probe.solver_log).has_value();
    if (record.exit_code != 0) {
        if (!probe.mesh_log && !probe.solver_log) return OutcomeTag::GridFail;
        if (stepped && any_match(*probe.solver_log, rules.divergence_patterns)) return OutcomeTag::Diverged;
        return OutcomeTag::RunFail;
    }

    if (!stepped) return OutcomeTag::Diverged;
    if (any_match(*probe.solver_log, rules.divergence_patterns)) return OutcomeTag::Diverged;
    if (!probe.end_time) return OutcomeTag::Diverged;
    const double reached = *final_time(*probe.solver_log);
    const double tolerance = 1e-9 * std::max(1.0, std::abs(*probe.end_time));
    if (reached + tolerance < *probe.end_time) return OutcomeTag::Diverged;
    if (!has_marker_line(*probe.solver_log, rules.completion_markers)) return OutcomeTag::Diverged;
    return OutcomeTag::Completed;
}

const std::string& LiveCommands::for_kind(SubtaskKind kind) const {
    switch (kind) {
        case SubtaskKind::SimulationRun: return simulation;
        case SubtaskKind::PostprocessCommand: return postprocess_command;
        case SubtaskKind::PostprocessScript: return postprocess_script;
    }
    return simulation;
}

RunRecord LiveExecutor::run(SubtaskKind kind, const std::filesystem::path& workdir, int /*attempt*/) {
    RunRecord record = execute(commands_.for_kind(kind), workdir, options_);
    record.outcome_tag = derive_outcome(record, kind, probe_case(workdir, record, rules_), rules_);
    return record;
}

}  // namespace cotflow::sandbox
