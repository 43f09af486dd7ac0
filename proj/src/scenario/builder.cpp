// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/scenario/builder.hpp"

#include "cotflow/agents/wire.hpp"
#include "cotflow/util.hpp"
#include "cotflow/workflow/engine.hpp"

#include <array>

namespace cotflow::scenario {

namespace {

int kind_index(std::optional<SubtaskKind> kind) { return kind ? static_cast<int>(*kind) + 1 : 0; }

agents::FileSet inputs_for(SubtaskKind kind, int revision) {
    const std::string rev = "revision " + std::to_string(revision);
    switch (kind) {
        case SubtaskKind::SimulationRun:
            return {{{"system/controlDict", "// " + rev + "\napplication simpleFoam;\nendTime 1;\n"},
                     {"Allrun", "#!/bin/sh\n# " + rev + "\nblockMesh > log.blockMesh\nsimpleFoam > log.simpleFoam\n"}}};
        case SubtaskKind::PostprocessCommand:
            return {{{"postprocessing_command.sh", "#!/bin/sh\n# " + rev + "\npostProcess -latestTime\n"}}};
        case SubtaskKind::PostprocessScript:
            return {{{"postprocessing_python.py", "# " + rev + "\nprint('postprocessing_var = 1.0')\n"}}};
    }
    return {};
}

std::string failure_stderr(SubtaskKind kind, int attempt) {
    switch (kind) {
        case SubtaskKind::SimulationRun:
            return "--> FOAM FATAL ERROR: keyword div(phi,U) is undefined (attempt " + std::to_string(attempt) + ")\n";
        case SubtaskKind::PostprocessCommand:
            return "postProcess: unknown function object (attempt " + std::to_string(attempt) + ")\n";
        case SubtaskKind::PostprocessScript:
            return "Traceback (most recent call last):\nKeyError: 'yPlus' (attempt " + std::to_string(attempt) + ")\n";
    }
    return {};
}

// Script output and files that make the oracle hold (or fail).
void fill_results(ScriptedOutcome& out, const std::optional<workflow::OraclePredicate>& oracle, bool ok) {
    if (!oracle) {
        out.stdout_text = "post-processing finished\n";
        return;
    }
    using Kind = workflow::OraclePredicate::Kind;
    switch (oracle->kind) {
        case Kind::ScalarInRange: {
            const double value = ok ? oracle->lo + 0.25 * (oracle->hi - oracle->lo)
                                    : (oracle->lo > 0.0 ? 0.0 : oracle->hi + 1.0 + std::abs(oracle->hi));
            out.stdout_text = oracle->target + " = " + format_fixed(value, 6) + "\n";
            break;
        }
        case Kind::FileNonEmpty:
            out.stdout_text = "saved " + oracle->target + "\n";
            out.files[oracle->target] = ok ? "synthetic image payload\n" : "";
            break;
        case Kind::SeriesNonEmpty:
            out.stdout_text = "saved " + oracle->target + "\n";
            out.files[oracle->target] = ok ? "coord,value\n0.0,1.0\n0.01,1.5\n0.02,1.75\n" : "coord,value\n";
            break;
    }
}

class Mirror {
public:
    Mirror(const BuildInput& in, const workflow::AblationConfig& cfg) : in_(in), cfg_(cfg) {
        pending_malformed_ = in.plan.malformed_first;
        remaining_[SubtaskKind::SimulationRun] = in.plan.simulation.failures;
        remaining_[SubtaskKind::PostprocessCommand] = in.plan.command.failures;
        remaining_[SubtaskKind::PostprocessScript] = in.plan.script.failures;
    }

    ScenarioScript build() {
        script_.description = in_.description;
        const auto [sim_text, post_text] = split_requirement(in_.requirement);
        std::vector<agents::PlannedTask> plan{{TaskKind::Simulation, sim_text}};
        if (post_text) plan.push_back({TaskKind::Postprocessing, *post_text});
        reply(AgentRole::Architect, std::nullopt, Phase::NonIteration, agents::render_plan(plan));

        std::vector<workflow::Subtask> subtasks;
        if (cfg_.qdcot_level == 0) {
            subtasks.push_back({SubtaskKind::SimulationRun, in_.requirement});
        } else {
            for (const auto& t : plan) {
                for (auto& s : workflow::decompose_task(t, cfg_)) subtasks.push_back(std::move(s));
            }
        }

        std::size_t start = 0;
        for (int round = 0; round < cfg_.max_verification_rounds; ++round) {
            bool failed = false;
            for (std::size_t i = start; i < subtasks.size(); ++i) {
                if (!run_subtask(subtasks[i].kind, round > 0 && i == start)) {
                    failed = true;
                    break;
                }
            }
            if (failed) break;
            const bool reject = static_cast<std::size_t>(round) < in_.plan.rejections.size();
            agents::Verdict verdict;
            if (reject) {
                verdict.status = agents::VerdictStatus::Failure;
                verdict.files_to_modify = in_.plan.rejections[static_cast<std::size_t>(round)];
                verdict.problem_description = "The extracted result is not physically reasonable.";
            }
            reply(AgentRole::Verifier, std::nullopt, Phase::NonIteration, agents::render_verdict(verdict));
            if (!reject || round + 1 == cfg_.max_verification_rounds) break;
            try {
                start = workflow::map_files_to_subtask(verdict.files_to_modify, subtasks);
            } catch (const Error&) {
                break;  // the engine aborts here too
            }
        }
        return std::move(script_);
    }

private:
    void reply(AgentRole role, std::optional<SubtaskKind> kind, Phase phase, std::string text) {
        if (pending_malformed_.erase(role) > 0) emit(role, kind, phase, "I am unable to produce that format.");
        emit(role, kind, phase, std::move(text));
    }

    void emit(AgentRole role, std::optional<SubtaskKind> kind, Phase phase, std::string text) {
        const int attempt = calls_[{role, kind}]++;
        script_.responses[llm::CallKey{role, kind, attempt}] = sized_reply(role, phase, kind, attempt, std::move(text));
    }

    bool execute(SubtaskKind kind) {
        const int attempt = execs_[kind]++;
        const FailurePlan::Stage& stage = kind == SubtaskKind::SimulationRun        ? in_.plan.simulation
                                          : kind == SubtaskKind::PostprocessCommand ? in_.plan.command
                                                                                    : in_.plan.script;
        bool fail = stage.permanent;
        if (!fail && remaining_[kind] > 0) {
            --remaining_[kind];
            fail = true;
        }
        ScriptedOutcome out;
        switch (kind) {
            case SubtaskKind::SimulationRun:
                out.tag = fail ? in_.plan.simulation_failure : OutcomeTag::Completed;
                if (!fail) out.stdout_text = "Time = 0.5\nTime = 1\nEnd\n";
                break;
            case SubtaskKind::PostprocessCommand:
                out.tag = fail ? OutcomeTag::CommandFail : OutcomeTag::CommandOk;
                if (!fail) out.stdout_text = "postProcess finished\n";
                break;
            case SubtaskKind::PostprocessScript:
                out.tag = fail ? OutcomeTag::ScriptFail : OutcomeTag::ScriptOk;
                if (!fail) fill_results(out, in_.oracle, in_.plan.oracle_ok);
                break;
        }
        if (fail) out.stderr_text = failure_stderr(kind, attempt);
        script_.executor_outcomes[{kind, attempt}] = std::move(out);
        return !fail;
    }

    bool run_subtask(SubtaskKind kind, bool with_feedback) {
        int& revision = revisions_[kind];
        reply(AgentRole::InputWriter, kind, with_feedback ? Phase::Iteration : Phase::NonIteration,
              agents::render_fileset(inputs_for(kind, revision++)));
        bool ok = execute(kind);
        int& used = used_[kind];
        while (!ok) {
            if (!workflow::has_reviewer(kind, cfg_) || used >= cfg_.max_iterations) break;
            ++used;
            reply(AgentRole::Reviewer, kind, Phase::Iteration,
                  agents::render_review({"The run failed; fix the offending entry.",
                                         {inputs_for(kind, 0).entries.front().path}}));
            reply(AgentRole::InputWriter, kind, Phase::Iteration,
                  agents::render_fileset(inputs_for(kind, revision++)));
            ok = execute(kind);
        }
        remaining_[kind] = 0;  // injected failures apply to the first entry only
        return ok;
    }

    const BuildInput& in_;
    workflow::AblationConfig cfg_;
    ScenarioScript script_;
    std::set<AgentRole> pending_malformed_;
    std::map<std::pair<AgentRole, std::optional<SubtaskKind>>, int> calls_;
    std::map<SubtaskKind, int> execs_;
    std::map<SubtaskKind, int> used_;
    std::map<SubtaskKind, int> remaining_;
    std::map<SubtaskKind, int> revisions_;
};

}  // namespace

std::pair<std::string, std::optional<std::string>> split_requirement(std::string_view text) {
    static constexpr std::array<std::string_view, 9> kMarkers{
        ". And the postprocessing task is", "And the postprocessing task is", " and then carry out post-processing",
        " and extract ",                    " and plot ",                     " and use ",
        " and compute ",                    " and calculate ",                " and visualize "};
    const std::string_view t = trim(text);
    std::size_t best = std::string_view::npos;
    for (auto m : kMarkers) {
        const auto pos = t.find(m);
        if (pos != std::string_view::npos && pos < best) best = pos;
    }
    if (best == std::string_view::npos) return {std::string(t), std::nullopt};
    std::string sim(trim(t.substr(0, best)));
    while (!sim.empty() && (sim.back() == ',' || sim.back() == ';' || sim.back() == '.')) sim.pop_back();
    std::string post(trim(t.substr(best)));
    for (std::string_view lead : {". ", "and then ", "and ", "And "}) {
        if (post.rfind(lead, 0) == 0) post.erase(0, lead.size());
    }
    return {sim, post};
}

llm::Completion sized_reply(AgentRole role, Phase phase, std::optional<SubtaskKind> kind, int attempt,
                            std::string text) {
    const int k = kind_index(kind);
    std::int64_t prompt = 0;
    std::int64_t completion = 0;
    switch (role) {
        case AgentRole::Architect:
            prompt = 2200 + 7 * attempt;
            completion = 520;
            break;
        case AgentRole::InputWriter:
            if (phase == Phase::Iteration) {
                prompt = 3400 + 150 * k + 23 * attempt;
                completion = 780 + 40 * k;
            } else {
                prompt = 2600 + 150 * k + 11 * attempt;
                completion = 640 + 50 * k;
            }
            break;
        case AgentRole::Reviewer:
            prompt = 3000 + 100 * k + 17 * attempt;
            completion = 420;
            break;
        case AgentRole::Verifier:
            prompt = 1800 + 9 * attempt;
            completion = 260;
            break;
    }
    return llm::Completion{std::move(text), prompt, completion};
}

ScenarioScript build_scenario(const BuildInput& input, const workflow::AblationConfig& cfg) {
    cfg.validate();
    return Mirror(input, cfg).build();
}

void cover_reduced_configs(ScenarioScript& script, const BuildInput& input, const workflow::AblationConfig& cfg) {
    cfg.validate();
    for (int q = cfg.qdcot_level; q >= 0; --q) {
        for (int i = cfg.icot_level; i >= 0; --i) {
            workflow::AblationConfig reduced = cfg;
            reduced.qdcot_level = q;
            reduced.icot_level = i;
            const ScenarioScript extra = Mirror(input, reduced).build();
            script.responses.insert(extra.responses.begin(), extra.responses.end());
            script.executor_outcomes.insert(extra.executor_outcomes.begin(), extra.executor_outcomes.end());
        }
    }
}

ScenarioScript build_ablation_scenario(const BuildInput& input, const workflow::AblationConfig& cfg) {
    ScenarioScript script = build_scenario(input, cfg);
    cover_reduced_configs(script, input, cfg);
    return script;
}

}  // namespace cotflow::scenario
