// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/workflow/engine.hpp"

#include "cotflow/retrieval/corpus.hpp"
#include "cotflow/util.hpp"

#include <algorithm>
#include <array>

namespace cotflow::workflow {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 47> kSolverInputs{
    "controlDict",       "fvSchemes",          "fvSolution",
    "blockMeshDict",     "snappyHexMeshDict",  "surfaceFeatureExtractDict",
    "decomposeParDict",  "setFieldsDict",      "topoSetDict",
    "transportProperties", "turbulenceProperties", "momentumTransport",
    "physicalProperties", "thermophysicalProperties", "thermophysicalTransport",
    "chemistryProperties", "combustionProperties", "reactions",
    "thermo.compressibleGas", "g",             "fvOptions",
    "fvModels",          "fvConstraints",      "radiationProperties",
    "dynamicMeshDict",   "MRFProperties",      "Allrun",
    "Allclean",          "Allmesh",            "U",
    "p",                 "p_rgh",              "k",
    "epsilon",           "omega",              "nut",
    "nuTilda",           "alphat",             "T",
    "CH4",               "O2",                 "N2",
    "H2O",               "CO2",                "Ydefault",
    "cloudProperties",   "kinematicCloudProperties"};

std::string_view basename_of(std::string_view path) {
    const auto slash = path.find_last_of('/');
    return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

bool is_case_dir_path(std::string_view path) {
    for (std::string_view dir : {"0/", "0.orig/", "system/", "constant/"}) {
        if (path.rfind(dir, 0) == 0) return true;
    }
    return false;
}

std::string_view event_for(AgentRole role) {
    switch (role) {
        case AgentRole::Architect: return "decomposition";
        case AgentRole::InputWriter: return "write";
        case AgentRole::Reviewer: return "review";
        case AgentRole::Verifier: return "verdict";
    }
    return "?";
}

sandbox::RunRecord execute_once(SubtaskKind kind, IcotContext& ctx) {
    const int attempt = ctx.executions[kind]++;
    sandbox::RunRecord run = ctx.executor.run(kind, ctx.session.workdir(), attempt);
    if (!run.outcome_tag) throw Error(ErrorCode::ExecutorFault, "executor returned an unclassified run");
    if (ctx.log) {
        ctx.log->event("attempt", kind, attempt,
                       {{"outcome", to_string(*run.outcome_tag)},
                        {"exit_code", run.exit_code},
                        {"timed_out", run.timed_out}});
    }
    return run;
}

}  // namespace

Decomposition decompose_requirement(agents::AgentSession& session, const Requirement& req,
                                    std::string_view context, const AblationConfig& cfg) {
    if (trim(req.text).empty()) throw Error(ErrorCode::DomainError, "requirement text is empty");
    auto plan = session.architect_plan(req.text, context);
    Decomposition out;
    out.postprocessing_requested = std::any_of(plan.begin(), plan.end(), [](const agents::PlannedTask& t) {
        return t.kind == TaskKind::Postprocessing;
    });
    if (cfg.qdcot_level == 0) {
        out.tasks = {agents::PlannedTask{TaskKind::Simulation, req.text}};
    } else {
        out.tasks = std::move(plan);
    }
    return out;
}

std::vector<Subtask> decompose_task(const agents::PlannedTask& task, const AblationConfig& cfg) {
    if (task.kind == TaskKind::Simulation) return {Subtask{SubtaskKind::SimulationRun, task.description}};
    std::vector<Subtask> out;
    if (cfg.qdcot_level >= 1) out.push_back(Subtask{SubtaskKind::PostprocessCommand, task.description});
    if (cfg.qdcot_level >= 2) out.push_back(Subtask{SubtaskKind::PostprocessScript, task.description});
    return out;
}

bool has_reviewer(SubtaskKind kind, const AblationConfig& cfg) {
    switch (kind) {
        case SubtaskKind::SimulationRun: return cfg.icot_level >= 1;
        case SubtaskKind::PostprocessCommand: return cfg.icot_level >= 2;
        case SubtaskKind::PostprocessScript: return cfg.icot_level >= 3;
    }
    return false;
}

std::optional<SubtaskKind> file_role(std::string_view file) {
    const auto path = trim(file);
    const auto base = basename_of(path);
    if (base.empty()) return std::nullopt;
    if (std::find(kSolverInputs.begin(), kSolverInputs.end(), base) != kSolverInputs.end()) {
        return SubtaskKind::SimulationRun;
    }
    if (ends_with(base, ".py")) return SubtaskKind::PostprocessScript;
    if (ends_with(base, ".sh") || base.find("command") != std::string_view::npos) {
        return SubtaskKind::PostprocessCommand;
    }
    if (is_case_dir_path(path)) return SubtaskKind::SimulationRun;
    return std::nullopt;
}

std::size_t map_files_to_subtask(const std::vector<std::string>& files, const std::vector<Subtask>& subtasks) {
    if (files.empty()) throw Error(ErrorCode::UnmappableFiles, "verdict names no files to modify");
    std::vector<SubtaskKind> roles;
    std::string unknown;
    for (const auto& f : files) {
        if (auto r = file_role(f)) {
            roles.push_back(*r);
        } else {
            unknown += (unknown.empty() ? "" : ", ") + f;
        }
    }
    for (std::size_t i = 0; i < subtasks.size(); ++i) {
        if (std::find(roles.begin(), roles.end(), subtasks[i].kind) != roles.end()) return i;
    }
    std::string listed;
    for (const auto& f : files) listed += (listed.empty() ? "" : ", ") + f;
    throw Error(ErrorCode::UnmappableFiles,
                "no scheduled subtask owns [" + listed + "]" + (unknown.empty() ? "" : "; unknown: " + unknown));
}

SubtaskOutcome run_icot(Subtask& sub, const AblationConfig& cfg, IcotContext& ctx,
                        const std::optional<agents::ReviewFeedback>& initial_feedback,
                        std::string_view initial_error) {
    const SubtaskKind kind = sub.kind;
    int& used = ctx.iterations_used[kind];
    agents::FileSet& files = ctx.files[kind];

    files.merge(ctx.session.write_inputs(kind, sub.description, ctx.requirement, ctx.context, initial_feedback,
                                         files, initial_error));
    SubtaskOutcome out;
    out.kind = kind;
    out.final_run = execute_once(kind, ctx);
    while (!is_success_tag(*out.final_run.outcome_tag)) {
        if (!has_reviewer(kind, cfg)) break;
        if (used >= cfg.max_iterations) {
            out.budget_exhausted = true;
            break;
        }
        ++used;
        ++out.iterations_used;
        const auto feedback = ctx.session.review_error(kind, sub.description, out.final_run, files);
        files.merge(ctx.session.write_inputs(kind, sub.description, ctx.requirement, ctx.context, feedback, files,
                                             agents::error_excerpt(out.final_run)));
        out.final_run = execute_once(kind, ctx);
    }
    out.success = is_success_tag(*out.final_run.outcome_tag);
    sub.attempts = used;
    sub.status = out.success ? SubtaskStatus::Succeeded : SubtaskStatus::Failed;
    return out;
}

WorkflowTrace run_workflow(const Requirement& req, const AblationConfig& cfg, const WorkflowDeps& deps,
                           const std::string& run_id) {
    cfg.validate();
    if (!deps.backend || !deps.executor || !deps.templates) {
        throw Error(ErrorCode::ConfigError, "workflow needs a backend, an executor and templates");
    }
    WorkflowTrace trace;
    trace.run_id = run_id;
    trace.requirement_id = req.id;
    trace.config = cfg;

    const auto workdir = deps.run_dir / "work";
    std::error_code ec;
    std::filesystem::remove_all(workdir, ec);
    std::filesystem::create_directories(workdir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + workdir.string() + ": " + ec.message());

    TraceLogWriter log(deps.run_dir / "trace.jsonl", run_id, deps.clock);
    agents::AgentSession session(*deps.backend, *deps.templates, deps.params, trace.ledger, workdir);
    session.set_observer([&log](const agents::AgentCall& call) {
        log.event(event_for(call.key.role), call.key.subtask, call.key.attempt,
                  {{"phase", to_string(call.phase)},
                   {"prompt_tokens", call.prompt_tokens},
                   {"completion_tokens", call.completion_tokens},
                   {"parsed", call.parsed}});
    });
    IcotContext ctx{session, *deps.executor, req.text, {}, {}, {}, {}, &log};

    std::map<SubtaskKind, SubtaskOutcome> latest;
    bool postprocessing_requested = false;
    bool verifier_passed = false;
    bool oracle_passed = false;
    Milestones best{};
    auto snapshot = [&] {
        MilestoneInputs in;
        if (auto it = latest.find(SubtaskKind::SimulationRun); it != latest.end()) {
            in.simulation_tag = it->second.final_run.outcome_tag;
        }
        in.postprocessing_requested = postprocessing_requested;
        for (const auto& s : trace.subtasks) {
            if (s.kind == SubtaskKind::SimulationRun) continue;
            auto it = latest.find(s.kind);
            const bool ok = it != latest.end() && it->second.success;
            (s.kind == SubtaskKind::PostprocessCommand ? in.command_ok : in.script_ok) = ok;
        }
        in.verifier_passed = verifier_passed;
        in.oracle_passed = oracle_passed;
        const Milestones m = compute_milestones(in);
        if (ladder_score(m) >= ladder_score(best)) best = m;
    };
    auto written_inputs = [&] {
        std::vector<std::string> inputs;
        for (const auto& [kind, files] : ctx.files) {
            for (const auto& e : files.entries) inputs.push_back(e.path);
        }
        return inputs;
    };
    auto script_output = [&]() -> std::string {
        for (SubtaskKind k : {SubtaskKind::PostprocessScript, SubtaskKind::PostprocessCommand}) {
            if (auto it = latest.find(k); it != latest.end()) return it->second.final_run.stdout_text;
        }
        return {};
    };

    try {
        std::vector<retrieval::RetrievalHit> hits;
        if (deps.index && deps.embedder && !deps.index->empty()) {
            hits = retrieval::search(*deps.index, *deps.embedder, req.text, deps.top_k);
        }
        if (!hits.empty()) {
            trace.seed_case = hits.front().doc->id;
            const auto& src = hits.front().doc->source_path;
            if (!src.empty() && std::filesystem::is_directory(src, ec)) {
                std::filesystem::copy(src, workdir,
                                      std::filesystem::copy_options::recursive |
                                          std::filesystem::copy_options::overwrite_existing,
                                      ec);
                if (ec) throw Error(ErrorCode::IoError, "cannot seed working directory: " + ec.message());
            }
        }
        ctx.context = retrieval::stack_context(hits, req.text, deps.context_budget);

        const Decomposition dec = decompose_requirement(session, req, ctx.context, cfg);
        postprocessing_requested = dec.postprocessing_requested;
        trace.tasks = dec.tasks;
        for (const auto& t : dec.tasks) {
            for (auto& s : decompose_task(t, cfg)) trace.subtasks.push_back(std::move(s));
        }
        json planned = json::array();
        for (const auto& s : trace.subtasks) planned.push_back(to_string(s.kind));
        log.event("plan", std::nullopt, 0,
                  {{"subtasks", planned}, {"postprocessing_requested", postprocessing_requested}});

        std::size_t start = 0;
        std::optional<agents::ReviewFeedback> feedback;
        std::string feedback_error;
        for (int round = 0; round < cfg.max_verification_rounds; ++round) {
            bool failed = false;
            for (std::size_t i = start; i < trace.subtasks.size(); ++i) {
                auto& sub = trace.subtasks[i];
                SubtaskOutcome out = i == start ? run_icot(sub, cfg, ctx, feedback, feedback_error)
                                                : run_icot(sub, cfg, ctx);
                if (out.budget_exhausted) trace.budget_exhausted = sub.kind;
                latest[sub.kind] = out;
                trace.outcomes.push_back(std::move(out));
                if (!trace.outcomes.back().success) {
                    failed = true;
                    break;
                }
            }
            if (failed) break;

            const auto artifacts = agents::scan_artifacts(workdir, written_inputs());
            const agents::Verdict verdict =
                session.verify_results(req.text, agents::describe_artifacts(artifacts, script_output()));
            ++trace.verification_rounds;
            trace.last_verdict = verdict;
            if (verdict.status == agents::VerdictStatus::Success) {
                verifier_passed = true;
                if (req.oracle) {
                    oracle_passed = evaluate_oracle(*req.oracle, workdir, script_output());
                } else if (deps.human_confirm) {
                    oracle_passed = deps.human_confirm(trace);
                }
                break;
            }
            snapshot();
            if (round + 1 == cfg.max_verification_rounds) break;
            start = map_files_to_subtask(verdict.files_to_modify, trace.subtasks);
            feedback = agents::ReviewFeedback{
                verdict.problem_description.empty() ? std::string("The result check failed.")
                                                    : verdict.problem_description,
                verdict.files_to_modify};
            feedback_error = verdict.problem_description;
            log.event("resume", trace.subtasks[start].kind, round + 1,
                      {{"files", verdict.files_to_modify}, {"problem", verdict.problem_description}});
        }
    } catch (const Error& e) {
        trace.abort = AbortInfo{e.code(), e.what()};
        log.event("abort", std::nullopt, 0, {{"code", to_string(e.code())}, {"message", e.what()}});
    }
    snapshot();

    trace.milestones = best;
    for (SubtaskKind k : kAllSubtaskKinds) trace.iterations[k] = ctx.iterations_used[k];
    for (const auto& a : agents::scan_artifacts(workdir, written_inputs())) trace.artifacts.push_back(a.path);
    log.event("summary", std::nullopt, 0, summarize(trace));
    return trace;
}

}  // namespace cotflow::workflow
