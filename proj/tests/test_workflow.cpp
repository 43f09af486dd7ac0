// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include "cotflow/agents/wire.hpp"
#include "cotflow/metrics/metrics.hpp"
#include "cotflow/metrics/run_summary.hpp"
#include "cotflow/retrieval/corpus.hpp"
#include "cotflow/retrieval/embedding.hpp"
#include "cotflow/scenario/script.hpp"
#include "cotflow/util.hpp"
#include "cotflow/workflow/trace_log.hpp"

#include <doctest.h>

#include <random>

using namespace cotflow;
using namespace cotflow::workflow;
using scenario::FailurePlan;

namespace {

AblationConfig cfg_of(int q, int i) {
    AblationConfig c;
    c.qdcot_level = q;
    c.icot_level = i;
    return c;
}

FailurePlan sim_failures(int n, bool permanent = false) {
    FailurePlan p;
    p.simulation = {n, permanent};
    return p;
}

int count_kind(const WorkflowTrace& t, SubtaskKind k) {
    int n = 0;
    for (const auto& o : t.outcomes) n += o.kind == k;
    return n;
}

std::vector<SubtaskKind> kinds(const std::vector<Subtask>& subs) {
    std::vector<SubtaskKind> out;
    for (const auto& s : subs) out.push_back(s.kind);
    return out;
}

struct Fixture {
    explicit Fixture(const scenario::ScenarioScript& s) : script(s), backend(s.responses), executor(script) {
        session = std::make_unique<agents::AgentSession>(backend, testing::templates(), llm::LlmParams{}, ledger,
                                                         dir.path());
    }
    testing::TempDir dir;
    scenario::ScenarioScript script;
    llm::ScriptedBackend backend;
    sandbox::SimulatedExecutor executor;
    llm::TokenLedger ledger;
    std::unique_ptr<agents::AgentSession> session;
};

}  // namespace

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(AblationConfig{}.validate());
    CHECK_ERROR_CODE(ErrorCode::ConfigError, cfg_of(3, 3).validate());
    CHECK_ERROR_CODE(ErrorCode::ConfigError, cfg_of(2, 4).validate());
    CHECK_ERROR_CODE(ErrorCode::ConfigError, cfg_of(-1, 0).validate());
    AblationConfig c;
    c.max_iterations = 0;
    CHECK_ERROR_CODE(ErrorCode::ConfigError, c.validate());
}

TEST_CASE("requirement decomposition") {
    const auto script = scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), {}, "t"});
    for (int q = 0; q <= 2; ++q) {
        Fixture f(script);
        const auto d = decompose_requirement(*f.session, {"r", testing::kPitzYplus, std::nullopt}, "", cfg_of(q, 3));
        CHECK(d.postprocessing_requested);
        if (q == 0) {
            REQUIRE(d.tasks.size() == 1);
            CHECK(d.tasks[0].kind == TaskKind::Simulation);
            CHECK(d.tasks[0].description == testing::kPitzYplus);
        } else {
            REQUIRE(d.tasks.size() == 2);
            CHECK(d.tasks[1].kind == TaskKind::Postprocessing);
            CHECK(d.tasks[1].description.find("yplus") != std::string::npos);
        }
    }
    const std::string plain = "do a RANS simulation of incompressible pitzDaily flow using simpleFoam";
    Fixture f(scenario::build_scenario({plain, std::nullopt, {}, "t"}));
    const auto d = decompose_requirement(*f.session, {"r", plain, std::nullopt}, "", {});
    REQUIRE(d.tasks.size() == 1);
    CHECK_FALSE(d.postprocessing_requested);
    Fixture g(script);
    CHECK_ERROR_CODE(ErrorCode::DomainError, decompose_requirement(*g.session, {"r", "  ", std::nullopt}, "", {}));
}

TEST_CASE("requirement splitting keeps solver and extraction apart") {
    const auto& t06 = testing::benchmark_tasks()[5].requirement;
    const auto [sim, post] = scenario::split_requirement(t06);
    CHECK(sim.find("reactingFoam") != std::string::npos);
    REQUIRE(post);
    CHECK(post->find("max temperature") != std::string::npos);
    CHECK_FALSE(scenario::split_requirement("do a RANS simulation of X").second);
}

TEST_CASE("task decomposition") {
    const agents::PlannedTask post{TaskKind::Postprocessing, "p"};
    const agents::PlannedTask sim{TaskKind::Simulation, "s"};
    using K = SubtaskKind;
    CHECK(kinds(decompose_task(post, cfg_of(2, 3))) == std::vector<K>{K::PostprocessCommand, K::PostprocessScript});
    CHECK(kinds(decompose_task(post, cfg_of(1, 3))) == std::vector<K>{K::PostprocessCommand});
    CHECK(decompose_task(post, cfg_of(0, 3)).empty());
    for (int q = 0; q <= 2; ++q) CHECK(kinds(decompose_task(sim, cfg_of(q, 0))) == std::vector<K>{K::SimulationRun});
}

TEST_CASE("reviewers are added stage by stage") {
    using K = SubtaskKind;
    const bool expect[4][3] = {{false, false, false}, {true, false, false}, {true, true, false}, {true, true, true}};
    for (int i = 0; i <= 3; ++i) {
        CHECK(has_reviewer(K::SimulationRun, cfg_of(2, i)) == expect[i][0]);
        CHECK(has_reviewer(K::PostprocessCommand, cfg_of(2, i)) == expect[i][1]);
        CHECK(has_reviewer(K::PostprocessScript, cfg_of(2, i)) == expect[i][2]);
    }
}

TEST_CASE("file roles and resume mapping") {
    using K = SubtaskKind;
    const std::vector<Subtask> subs{{K::SimulationRun, "s"}, {K::PostprocessCommand, "c"}, {K::PostprocessScript, "p"}};
    CHECK(file_role("postprocessing_python.py") == K::PostprocessScript);
    CHECK(file_role("postprocessing_command.sh") == K::PostprocessCommand);
    CHECK(file_role("controlDict") == K::SimulationRun);
    CHECK(file_role("system/fvSchemes") == K::SimulationRun);
    CHECK(file_role("0/U") == K::SimulationRun);
    CHECK_FALSE(file_role("notes.txt"));
    CHECK(map_files_to_subtask({"postprocessing_python.py"}, subs) == 2);
    CHECK(map_files_to_subtask({"controlDict"}, subs) == 0);
    CHECK(map_files_to_subtask({"postprocessing_python.py", "postprocessing_command.sh"}, subs) == 1);
    CHECK(map_files_to_subtask({"mystery.bin", "postprocessing_python.py"}, subs) == 2);
    CHECK_ERROR_CODE(ErrorCode::UnmappableFiles, map_files_to_subtask({}, subs));
    CHECK_ERROR_CODE(ErrorCode::UnmappableFiles, map_files_to_subtask({"mystery.bin"}, subs));
    CHECK_ERROR_CODE(ErrorCode::UnmappableFiles, map_files_to_subtask({"postprocessing_python.py"}, {subs[0]}));
}

TEST_CASE("icot loop counts one iteration per injected failure") {
    for (int failures = 0; failures <= 10; ++failures) {
        CAPTURE(failures);
        Fixture f(scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), sim_failures(failures), "t"}));
        IcotContext ctx{*f.session, f.executor, testing::kPitzYplus, "", {}, {}, {}, nullptr};
        Subtask sub{SubtaskKind::SimulationRun, "run pitzDaily"};
        const auto out = run_icot(sub, {}, ctx);
        CHECK(out.success);
        CHECK(out.iterations_used == failures);
        CHECK_FALSE(out.budget_exhausted);
        CHECK(sub.status == SubtaskStatus::Succeeded);
        CHECK(sub.attempts == failures);
        CHECK(out.final_run.exit_code == 0);
        CHECK(ctx.executions[SubtaskKind::SimulationRun] == failures + 1);
        // first write is setup, each cycle is one review and one rewrite
        CHECK(f.ledger.size() == 1 + 2 * static_cast<std::size_t>(failures));
        CHECK(f.ledger.totals(Phase::NonIteration).total() == f.ledger.entries()[0].prompt_tokens +
                                                                  f.ledger.entries()[0].completion_tokens);
    }
}

TEST_CASE("icot loop stops hard at the iteration cap") {
    for (int cap : {1, 3, 10}) {
        AblationConfig cfg;
        cfg.max_iterations = cap;
        Fixture f(scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), sim_failures(0, true), "t"},
                                           cfg));
        IcotContext ctx{*f.session, f.executor, testing::kPitzYplus, "", {}, {}, {}, nullptr};
        Subtask sub{SubtaskKind::SimulationRun, "run"};
        const auto out = run_icot(sub, cfg, ctx);
        CHECK_FALSE(out.success);
        CHECK(out.budget_exhausted);
        CHECK(out.iterations_used == cap);
        CHECK(sub.status == SubtaskStatus::Failed);
        CHECK(ctx.executions[SubtaskKind::SimulationRun] == cap + 1);
    }
}

TEST_CASE("without a reviewer the loop exits on the first error") {
    Fixture f(scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), sim_failures(1), "t"}));
    IcotContext ctx{*f.session, f.executor, testing::kPitzYplus, "", {}, {}, {}, nullptr};
    Subtask sub{SubtaskKind::SimulationRun, "run"};
    const auto out = run_icot(sub, cfg_of(2, 0), ctx);
    CHECK_FALSE(out.success);
    CHECK(out.iterations_used == 0);
    CHECK_FALSE(out.budget_exhausted);
    CHECK(f.ledger.size() == 1);
}

TEST_CASE("milestone ladder and score") {
    MilestoneInputs in;
    CHECK(ladder_score(compute_milestones(in)) == 0);
    in.simulation_tag = OutcomeTag::GridFail;
    CHECK(ladder_score(compute_milestones(in)) == 0);
    in.simulation_tag = OutcomeTag::RunFail;
    CHECK(ladder_score(compute_milestones(in)) == 1);
    in.simulation_tag = OutcomeTag::Diverged;
    CHECK(ladder_score(compute_milestones(in)) == 2);
    in.simulation_tag = OutcomeTag::Completed;
    in.postprocessing_requested = true;
    CHECK(ladder_score(compute_milestones(in)) == 3);
    in.command_ok = true;
    in.script_ok = false;
    CHECK(ladder_score(compute_milestones(in)) == 4);
    in.script_ok = true;
    CHECK(ladder_score(compute_milestones(in)) == 5);
    in.verifier_passed = true;
    CHECK(ladder_score(compute_milestones(in)) == 6);
    in.oracle_passed = true;
    const auto all = compute_milestones(in);
    CHECK(ladder_score(all) == 7);
    for (bool m : all) CHECK(m);

    // A later rung cannot hold without the earlier ones.
    MilestoneInputs gap;
    gap.simulation_tag = OutcomeTag::Diverged;
    gap.postprocessing_requested = true;
    gap.command_ok = true;
    gap.script_ok = true;
    gap.verifier_passed = true;
    gap.oracle_passed = true;
    CHECK(ladder_score(compute_milestones(gap)) == 2);

    // Vacuous post-processing rungs when none was asked for.
    MilestoneInputs sim_only;
    sim_only.simulation_tag = OutcomeTag::Completed;
    sim_only.verifier_passed = true;
    sim_only.oracle_passed = true;
    CHECK(ladder_score(compute_milestones(sim_only)) == 7);

    // Post-processing requested but never scheduled caps the run at 3.
    MilestoneInputs dropped = sim_only;
    dropped.postprocessing_requested = true;
    CHECK(ladder_score(compute_milestones(dropped)) == 3);
}

TEST_CASE("oracle evaluation") {
    testing::TempDir dir;
    CHECK(find_scalar("max_yplus = 19.62\nother: 3", "max_yplus") == doctest::Approx(19.62));
    CHECK(find_scalar("max_yplus = 1\nmax_yplus: 2.5e1", "max_yplus") == doctest::Approx(25.0));
    CHECK_FALSE(find_scalar("max_yplusx = 3", "max_yplus"));
    const auto o = testing::yplus_oracle();
    CHECK(evaluate_oracle(o, dir.path(), "max_yplus = 19.62164878845215"));
    CHECK_FALSE(evaluate_oracle(o, dir.path(), "max_yplus = 0.0"));
    CHECK_FALSE(evaluate_oracle(o, dir.path(), "no value"));

    const OraclePredicate png{OraclePredicate::Kind::FileNonEmpty, "U_contour.png", 0, 0};
    CHECK_FALSE(evaluate_oracle(png, dir.path(), ""));
    write_text_file(dir / "U_contour.png", "png");
    CHECK(evaluate_oracle(png, dir.path(), ""));

    const OraclePredicate series{OraclePredicate::Kind::SeriesNonEmpty, "p.csv", 0, 0};
    write_text_file(dir / "p.csv", "x,y\n");
    CHECK_FALSE(evaluate_oracle(series, dir.path(), ""));
    write_text_file(dir / "p.csv", "x,y\n0.1,2\n");
    CHECK(evaluate_oracle(series, dir.path(), ""));

    CHECK_ERROR_CODE(ErrorCode::SchemaError, (OraclePredicate{OraclePredicate::Kind::ScalarInRange, "x", 2, 1}.validate()));
    CHECK_ERROR_CODE(ErrorCode::SchemaError,
                     (OraclePredicate{OraclePredicate::Kind::ScalarInRange, "x", 0, std::nan("")}.validate()));
    const auto back = oracle_from_json(oracle_to_json(o), "o");
    CHECK(back.kind == o.kind);
    CHECK(back.target == o.target);
    CHECK(back.hi == o.hi);
}

TEST_CASE("all-success run reaches every rung") {
    testing::TempDir dir;
    const auto r = testing::run_plan({}, {}, dir.path());
    CHECK_FALSE(r.trace.abort);
    CHECK(r.trace.score() == 7);
    for (bool m : r.trace.milestones) CHECK(m);
    CHECK(r.trace.verification_rounds == 1);
    CHECK(r.trace.total_iterations() == 0);
    CHECK(r.unconsumed.empty());
    CHECK(metrics::score_executability(r.trace) == 7);
    CHECK(std::filesystem::exists(dir / "trace.jsonl"));
    CHECK(kinds(r.trace.subtasks).size() == 3);
}

TEST_CASE("verifier rejection citing the script resumes only the script") {
    FailurePlan plan;
    plan.rejections = {{"postprocessing_python.py"}};
    testing::TempDir dir;
    const auto r = testing::run_plan(plan, {}, dir.path());
    CHECK(r.trace.verification_rounds == 2);
    CHECK(count_kind(r.trace, SubtaskKind::SimulationRun) == 1);
    CHECK(count_kind(r.trace, SubtaskKind::PostprocessCommand) == 1);
    CHECK(count_kind(r.trace, SubtaskKind::PostprocessScript) == 2);
    CHECK(r.trace.outcomes.back().kind == SubtaskKind::PostprocessScript);
    CHECK(r.trace.score() == 7);
    CHECK(r.unconsumed.empty());
    const auto log = read_trace_log(dir / "trace.jsonl");
    int resumes = 0;
    for (const auto& rec : log) {
        if (rec["event"] == "resume") {
            ++resumes;
            CHECK(rec["subtask"] == "PostprocessScript");
        }
    }
    CHECK(resumes == 1);
}

TEST_CASE("rejection citing a solver input reruns everything downstream") {
    FailurePlan plan;
    plan.rejections = {{"controlDict"}};
    testing::TempDir dir;
    const auto r = testing::run_plan(plan, {}, dir.path());
    CHECK(r.trace.verification_rounds == 2);
    for (auto k : kAllSubtaskKinds) CHECK(count_kind(r.trace, k) == 2);
    CHECK(r.trace.score() == 7);
}

TEST_CASE("verification rounds are capped") {
    FailurePlan plan;
    plan.rejections.assign(3, {"postprocessing_python.py"});
    testing::TempDir dir;
    const auto r = testing::run_plan(plan, {}, dir.path());
    CHECK(r.trace.verification_rounds == 3);
    CHECK_FALSE(r.trace.milestones[6]);
    CHECK(r.trace.score() == 5);
    CHECK(r.unconsumed.empty());
}

TEST_CASE("the iteration budget holds across verification rounds") {
    FailurePlan plan;
    plan.script = {6, false};
    plan.rejections = {{"postprocessing_python.py"}};
    testing::TempDir dir;
    const auto r = testing::run_plan(plan, {}, dir.path());
    CHECK(r.trace.iterations.at(SubtaskKind::PostprocessScript) <= 10);
    CHECK(r.trace.iterations.at(SubtaskKind::PostprocessScript) >= 6);
    CHECK(r.unconsumed.empty());
}

TEST_CASE("grid failure without reviewers scores zero") {
    FailurePlan plan = sim_failures(1);
    plan.simulation_failure = OutcomeTag::GridFail;
    testing::TempDir dir;
    const auto r = testing::run_plan(plan, cfg_of(2, 0), dir.path());
    CHECK(r.trace.score() == 0);
    for (bool m : r.trace.milestones) CHECK_FALSE(m);
    CHECK(r.trace.verification_rounds == 0);
}

TEST_CASE("budget exhaustion is recorded, not fatal") {
    testing::TempDir dir;
    const auto r = testing::run_plan(sim_failures(0, true), {}, dir.path());
    CHECK(r.trace.budget_exhausted == SubtaskKind::SimulationRun);
    CHECK(r.trace.iterations.at(SubtaskKind::SimulationRun) == 10);
    CHECK_FALSE(r.trace.abort);
    CHECK(r.trace.score() == 1);
}

TEST_CASE("agent and executor errors abort the run with a trace") {
    auto script = scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), {}, "t"});
    script.responses.erase({AgentRole::Verifier, std::nullopt, 0});
    testing::TempDir dir;
    const auto r = testing::run_scripted(script, {"r", testing::kPitzYplus, testing::yplus_oracle()}, {}, dir.path());
    REQUIRE(r.trace.abort);
    CHECK(r.trace.abort->code == ErrorCode::MissingScenarioEntry);
    CHECK(r.trace.score() == 5);
    const auto log = read_trace_log(dir / "trace.jsonl");
    CHECK(log[log.size() - 2]["event"] == "abort");
    CHECK(log.back()["event"] == "summary");

    auto unmappable = scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), {}, "t"});
    unmappable.responses[{AgentRole::Verifier, std::nullopt, 0}].text =
        agents::render_verdict({agents::VerdictStatus::Failure, "odd", {"mystery.bin"}});
    testing::TempDir dir2;
    const auto u =
        testing::run_scripted(unmappable, {"r", testing::kPitzYplus, testing::yplus_oracle()}, {}, dir2.path());
    REQUIRE(u.trace.abort);
    CHECK(u.trace.abort->code == ErrorCode::UnmappableFiles);
    CHECK(u.trace.score() == 5);
}

TEST_CASE("without an oracle the last rung needs confirmation") {
    const auto script = scenario::build_scenario({testing::kPitzYplus, std::nullopt, {}, "t"});
    for (bool confirm : {false, true}) {
        llm::ScriptedBackend backend(script.responses);
        sandbox::SimulatedExecutor executor(script);
        testing::TempDir dir;
        WorkflowDeps deps;
        deps.backend = &backend;
        deps.executor = &executor;
        deps.templates = &testing::templates();
        deps.run_dir = dir.path();
        int asked = 0;
        deps.human_confirm = [&](const WorkflowTrace&) {
            ++asked;
            return confirm;
        };
        const auto t = run_workflow({"r", testing::kPitzYplus, std::nullopt}, {}, deps, "run");
        CHECK(asked == 1);
        CHECK(t.score() == (confirm ? 7 : 6));
    }
}

TEST_CASE("identical inputs give byte-identical trace logs") {
    FailurePlan plan;
    plan.simulation = {2, false};
    plan.script = {1, false};
    plan.rejections = {{"postprocessing_python.py"}};
    plan.malformed_first = {AgentRole::Architect, AgentRole::Reviewer};
    testing::TempDir a, b;
    testing::run_plan(plan, {}, a.path());
    testing::run_plan(plan, {}, b.path());
    CHECK(read_text_file(a / "trace.jsonl") == read_text_file(b / "trace.jsonl"));
}

TEST_CASE("trace log records and summary agree") {
    FailurePlan plan;
    plan.command = {3, false};
    testing::TempDir dir;
    const auto r = testing::run_plan(plan, {}, dir.path());
    const auto log = read_trace_log(dir / "trace.jsonl");
    REQUIRE(log.size() > 3);
    CHECK(log.front()["event"] == "decomposition");
    for (const auto& rec : log) {
        CHECK(rec["v"] == kTraceLogVersion);
        CHECK(rec["run"] == "run");
        CHECK(rec["wall_ms"] == 0);
        CHECK(rec.contains("subtask"));
        CHECK(rec.contains("attempt"));
    }
    CHECK(metrics::read_run_summary(dir / "trace.jsonl") == metrics::summarize_trace(r.trace));
    write_text_file(dir / "broken.jsonl", "{\"v\": 99}\n");
    CHECK_ERROR_CODE(ErrorCode::SchemaError, read_trace_log(dir / "broken.jsonl"));
}

TEST_CASE("retrieval seeds the working directory with the top case") {
    const auto sources = retrieval::read_corpus(retrieval::load_manifest(testing::data_dir() / "corpus/manifest.json"));
    const retrieval::MockEmbedder embedder;
    const auto index = retrieval::index_corpus(sources, embedder);
    const auto script = scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), {}, "t"});
    llm::ScriptedBackend backend(script.responses);
    sandbox::SimulatedExecutor executor(script);
    testing::TempDir dir;
    WorkflowDeps deps;
    deps.backend = &backend;
    deps.executor = &executor;
    deps.templates = &testing::templates();
    deps.index = &index;
    deps.embedder = &embedder;
    deps.run_dir = dir.path();
    const auto t = run_workflow({"r", testing::kPitzYplus, testing::yplus_oracle()}, {}, deps, "run");
    CHECK(t.seed_case == "pitzDaily");
    CHECK(std::filesystem::exists(dir / "work/system/controlDict"));
    CHECK(backend.prompts()[0].find("pitzDaily") != std::string::npos);
    CHECK(t.score() == 7);
}

namespace {

FailurePlan random_plan(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> fails(0, 12), pct(0, 99);
    const std::vector<std::string> files{"postprocessing_python.py", "postprocessing_command.sh", "controlDict",
                                         "0/U"};
    FailurePlan p;
    auto stage = [&] {
        return FailurePlan::Stage{pct(rng) < 55 ? 0 : fails(rng), pct(rng) < 8};
    };
    p.simulation = stage();
    p.command = stage();
    p.script = stage();
    p.simulation_failure = std::array{OutcomeTag::GridFail, OutcomeTag::RunFail, OutcomeTag::Diverged}[rng() % 3];
    for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) p.rejections.push_back({files[rng() % files.size()]});
    p.oracle_ok = pct(rng) < 80;
    for (auto role : {AgentRole::Architect, AgentRole::InputWriter, AgentRole::Reviewer, AgentRole::Verifier}) {
        if (pct(rng) < 10) p.malformed_first.insert(role);
    }
    return p;
}

bool subset(const Milestones& a, const Milestones& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("random scenarios: ladder, budgets, ledger and ablation nesting") {
    std::mt19937_64 rng(424242);
    const std::vector<std::string> texts{testing::kPitzYplus, testing::benchmark_tasks()[5].requirement,
                                         "do a RANS simulation of incompressible pitzDaily flow using simpleFoam"};
    for (int trial = 0; trial < 60; ++trial) {
        const auto plan = random_plan(rng);
        const auto& text = texts[rng() % texts.size()];
        const scenario::BuildInput input{text, testing::yplus_oracle(), plan, "rand"};
        const auto exact = scenario::build_scenario(input);
        const auto script = scenario::build_ablation_scenario(input);
        Milestones grid[3][4];
        for (int q = 0; q <= 2; ++q) {
            for (int i = 0; i <= 3; ++i) {
                CAPTURE(trial);
                CAPTURE(q);
                CAPTURE(i);
                testing::TempDir dir;
                const auto cfg = cfg_of(q, i);
                const auto r = testing::run_scripted(script, {"r", text, testing::yplus_oracle()}, cfg, dir.path());
                const auto& t = r.trace;
                // The only abort: a verdict naming a file no scheduled subtask owns
                // (ablated away, or a requirement without post-processing).
                CHECK((!t.abort || t.abort->code == ErrorCode::UnmappableFiles));
                for (std::size_t k = 1; k < kMilestoneCount; ++k) CHECK((!t.milestones[k] || t.milestones[k - 1]));
                for (const auto& [kind, n] : t.iterations) CHECK(n <= cfg.max_iterations);
                CHECK(t.verification_rounds <= cfg.max_verification_rounds);
                CHECK(metrics::score_executability(t) == ladder_score(t.milestones));
                const auto cats = metrics::categorize_tokens(t.ledger);
                CHECK(cats.total() == t.ledger.totals().total());
                if (q == 2 && i == 3) {
                    for (const auto& key : r.unconsumed) CHECK_FALSE(exact.responses.contains(key));
                    CHECK(t.ledger.totals() == scenario::declared_totals(exact));
                }
                grid[q][i] = t.milestones;
            }
        }
        for (int q = 0; q <= 2; ++q) {
            for (int i = 0; i < 3; ++i) CHECK(subset(grid[q][i], grid[q][i + 1]));
        }
        for (int i = 0; i <= 3; ++i) {
            for (int q = 0; q < 2; ++q) CHECK(subset(grid[q][i], grid[q + 1][i]));
        }
    }
}
