// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "family.hpp"

#include "cotflow/bench/ablation.hpp"
#include "cotflow/bench/benchmark.hpp"
#include "cotflow/bench/scenarios.hpp"
#include "cotflow/metrics/metrics.hpp"
#include "cotflow/metrics/results_table.hpp"
#include "cotflow/scenario/script.hpp"
#include "cotflow/util.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <numeric>

using namespace cotflow;
using namespace cotflow::bench;

TEST_CASE("shipped benchmark") {
    const auto& tasks = testing::benchmark_tasks();
    REQUIRE(tasks.size() == kBenchmarkTaskCount);
    int pitz = 0, vis = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "T%02zu", i + 1);
        CHECK(tasks[i].id == id);
        CHECK_FALSE(tasks[i].requirement.empty());
        CHECK_NOTHROW(tasks[i].oracle.validate());
        pitz += tasks[i].sim_case == "pitzDaily";
        vis += tasks[i].post_kind == PostKind::Visualization;
    }
    CHECK(pitz == 5);
    CHECK(vis > 0);
    CHECK(vis < 13);
    CHECK(tasks[0].requirement == testing::kPitzYplus);
    CHECK(tasks[9].oracle.kind == workflow::OraclePredicate::Kind::ScalarInRange);
    CHECK(tasks[9].oracle.target == "average_tke");
    const auto req = tasks[0].as_requirement();
    CHECK(req.id == "T01");
    CHECK(req.oracle);
}

TEST_CASE("benchmark schema errors") {
    auto doc = nlohmann::json::parse(read_text_file(testing::data_dir() / "benchmark.json"));
    doc["tasks"].erase(doc["tasks"].size() - 1);
    bool threw = false;
    try {
        parse_benchmark(doc.dump());
    } catch (const Error& e) {
        threw = e.code() == ErrorCode::SchemaError && std::string(e.what()).find("13") != std::string::npos;
    }
    CHECK(threw);

    auto dup = nlohmann::json::parse(read_text_file(testing::data_dir() / "benchmark.json"));
    dup["tasks"][1]["id"] = "T01";
    CHECK_ERROR_CODE(ErrorCode::SchemaError, parse_benchmark(dup.dump()));
    auto bad_oracle = nlohmann::json::parse(read_text_file(testing::data_dir() / "benchmark.json"));
    bad_oracle["tasks"][0]["oracle"]["lo"] = 5;
    bad_oracle["tasks"][0]["oracle"]["hi"] = 1;
    CHECK_ERROR_CODE(ErrorCode::SchemaError, parse_benchmark(bad_oracle.dump()));
    auto bad_kind = nlohmann::json::parse(read_text_file(testing::data_dir() / "benchmark.json"));
    bad_kind["tasks"][0]["post_kind"] = "Other";
    CHECK_ERROR_CODE(ErrorCode::SchemaError, parse_benchmark(bad_kind.dump()));
    CHECK_ERROR_CODE(ErrorCode::SchemaError, parse_benchmark("[]"));
}

TEST_CASE("names, modes and options") {
    CHECK(run_id_for("T01", 3) == "T01-s03");
    CHECK(scenario_path("d", "T07", 0) == std::filesystem::path("d/T07/s00.json"));
    CHECK(parse_mode("live") == Mode::Live);
    CHECK(parse_mode(to_string(Mode::Simulated)) == Mode::Simulated);
    CHECK_FALSE(parse_mode("dry"));
    BenchOptions o;
    o.out_dir = "x";
    o.scenario_dir = "y";
    CHECK_NOTHROW(o.validate());
    o.k = 11;
    CHECK_ERROR_CODE(ErrorCode::ConfigError, o.validate());
    o.k = 1;
    o.scenario_dir.clear();
    CHECK_ERROR_CODE(ErrorCode::ConfigError, o.validate());
    o.mode = Mode::Live;
    CHECK_NOTHROW(o.validate());
    o.jobs = 0;
    CHECK_ERROR_CODE(ErrorCode::ConfigError, o.validate());
}

TEST_CASE("sample plans honour the profile") {
    const auto table = metrics::load_results_csv(testing::data_dir() / "reference_tables.csv");
    const auto profiles = profiles_from_table(table);
    REQUIRE(profiles.size() == 13);
    for (const auto& p : profiles) {
        CAPTURE(p.task_id);
        const auto plans = plan_samples(p, 10);
        REQUIRE(plans.size() == 10);
        int flawless = 0, score = 0, sim = 0, post = 0, script = 0;
        for (const auto& s : plans) {
            flawless += s.expected_score == 7;
            score += s.expected_score;
            sim += s.sim_iterations;
            post += s.post_iterations;
            script += s.script_iterations;
            CHECK(s.sim_iterations <= 10);
            CHECK(s.post_iterations <= 10);
            CHECK(s.script_iterations <= 10);
        }
        CHECK(flawless == static_cast<int>(std::lround(p.pass_rate * 10)));
        CHECK(sim == static_cast<int>(std::lround(p.sim_iterations * 10)));
        CHECK(post == static_cast<int>(std::lround(p.post_iterations * 10)));
        CHECK(script == static_cast<int>(std::lround(p.script_iterations * 10)));
        if (p.task_id != "T09") CHECK(score == static_cast<int>(std::lround(p.executability * 10)));
    }
    // 80% flawless puts the floor at 8 * 7 / 10 = 5.6.
    const auto t09 = plan_samples(profiles[8], 10);
    CHECK(std::accumulate(t09.begin(), t09.end(), 0, [](int a, const SamplePlan& s) { return a + s.expected_score; }) ==
          56);
    CHECK_ERROR_CODE(ErrorCode::ConfigError, plan_samples(profiles[0], 0));
}

TEST_CASE("token calibration hits exact totals") {
    std::vector<scenario::ScenarioScript> scripts;
    for (int i = 0; i < 4; ++i) {
        scenario::FailurePlan p;
        p.simulation = {i, false};
        scripts.push_back(scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), p, "t"}));
    }
    calibrate_tokens(scripts, 123457, 31001);
    llm::TokenTotals sum;
    for (const auto& s : scripts) sum += scenario::declared_totals(s);
    CHECK(sum == llm::TokenTotals{123457, 31001});
    const auto before = scenario::declared_totals(scripts[0]);
    calibrate_tokens(scripts, -1, -1);
    CHECK(scenario::declared_totals(scripts[0]) == before);
}

TEST_CASE("scenario files round trip") {
    scenario::FailurePlan p;
    p.command = {2, false};
    p.rejections = {{"postprocessing_python.py"}};
    const auto s = scenario::build_scenario({testing::kPitzYplus, testing::yplus_oracle(), p, "desc"});
    const auto text = scenario::dump_scenario(s);
    CHECK(scenario::dump_scenario(scenario::parse_scenario(text)) == text);
    CHECK(scenario::parse_scenario(text).description == "desc");
    CHECK_ERROR_CODE(ErrorCode::SchemaError, scenario::parse_scenario("{}"));
    CHECK_ERROR_CODE(ErrorCode::SchemaError, scenario::parse_scenario("not json"));
}

TEST_CASE("n = 1 flawless sample") {
    testing::TempDir dir;
    const auto& task = testing::benchmark_tasks()[0];
    save_scenario(scenario::build_scenario({task.requirement, task.oracle, {}, "ok"}), scenario_path(dir / "s", "T01", 0));
    BenchOptions o;
    o.n = 1;
    o.out_dir = dir / "out";
    o.scenario_dir = dir / "s";
    const auto res = run_benchmark({task}, o, testing::sim_env());
    REQUIRE(res.size() == 1);
    CHECK(res[0].executability == 7.0);
    CHECK(res[0].pass_at_k == 1.0);
    CHECK(res[0].samples.size() == 1);
    const auto report = render_report(res, o);
    CHECK(report.find("all checks passed") != std::string::npos);
    const auto table = metrics::parse_results_csv(results_csv(res));
    REQUIRE(table.rows.size() == 1);
    CHECK(metrics::column_means(table).executability == 7.0);
    CHECK(std::filesystem::exists(dir / "out/runs/T01-s00/trace.jsonl"));
}

TEST_CASE("nine of ten flawless gives pass@1 = 0.9") {
    testing::TempDir dir;
    const auto& task = testing::benchmark_tasks()[0];
    for (int s = 0; s < 10; ++s) {
        scenario::FailurePlan p;
        if (s == 4) p.oracle_ok = false;
        save_scenario(scenario::build_scenario({task.requirement, task.oracle, p, "s"}), scenario_path(dir / "s", "T01", s));
    }
    BenchOptions o;
    o.out_dir = dir / "out";
    o.scenario_dir = dir / "s";
    const auto res = run_benchmark({task}, o, testing::sim_env());
    CHECK(res[0].flawless == 9);
    CHECK(res[0].pass_at_k == doctest::Approx(metrics::pass_at_k({10, 9, 1})));
    CHECK(res[0].executability == doctest::Approx(6.9));
}

TEST_CASE("missing scenario is reported before any run") {
    testing::TempDir dir;
    BenchOptions o;
    o.n = 2;
    o.out_dir = dir / "out";
    o.scenario_dir = dir / "none";
    CHECK_ERROR_CODE(ErrorCode::MissingScenarioEntry, run_benchmark({testing::benchmark_tasks()[0]}, o, testing::sim_env()));
    CHECK_FALSE(std::filesystem::exists(dir / "out/runs"));
}

TEST_CASE("reference family reproduces the published averages") {
    testing::TempDir out;
    const auto o = testing::sim_options(out.path());
    const auto res = run_benchmark(testing::benchmark_tasks(), o, testing::sim_env());
    REQUIRE(res.size() == 13);
    double e = 0, p = 0, t = 0, it = 0, pr = 0, co = 0, c = 0;
    for (const auto& r : res) {
        CHECK(r.samples.size() == 10);
        e += r.executability;
        p += r.pass_at_k;
        t += r.tokens();
        it += r.iterations;
        pr += r.prompt_tokens;
        co += r.completion_tokens;
        c += r.cost;
    }
    CHECK(std::abs(e / 13 - 6.3) <= 0.05);
    CHECK(std::abs(100 * p / 13 - 86.9) <= 0.1);
    CHECK(std::abs(t / 13 - 36448.0) <= 0.5);
    CHECK(std::abs(it / 13 - 3.7) <= 0.05);
    CHECK(std::abs(pr / 13 - 29157.4) <= 0.5);
    CHECK(std::abs(co / 13 - 7290.7) <= 0.5);
    CHECK(std::abs(c / 13 - 0.1458) <= 0.005);

    const auto report = render_report(res, o);
    CHECK(report.find("all checks passed") != std::string::npos);
    CHECK(report.find("Cost: 0.1458") != std::string::npos);

    // Average cells equal the column means of the emitted table.
    const auto table = metrics::parse_results_csv(results_csv(res));
    const auto m = metrics::column_means(table);
    CHECK(std::abs(m.executability - e / 13) <= 1e-9);
    CHECK(std::abs(m.tokens - t / 13) <= 1e-9);

    const auto path = write_report(res, o, out / "report");
    CHECK(read_text_file(path) == report);
    CHECK(std::filesystem::exists(out / "report/results_table.csv"));
    CHECK(std::filesystem::exists(out / "report/executability_vs_tokens.csv"));
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
    testing::TempDir a, b;
    auto oa = testing::sim_options(a.path());
    auto ob = testing::sim_options(b.path());
    ob.jobs = 3;
    const auto ra = render_report(run_benchmark(testing::benchmark_tasks(), oa, testing::sim_env()), oa);
    const auto rb = render_report(run_benchmark(testing::benchmark_tasks(), ob, testing::sim_env()), oa);
    CHECK(ra == rb);
    CHECK(read_text_file(a / "runs/T05-s07/trace.jsonl") == read_text_file(b / "runs/T05-s07/trace.jsonl"));
}

TEST_CASE("an interrupted batch resumes to the same report") {
    testing::TempDir a, b;
    const std::vector<BenchTask> tasks(testing::benchmark_tasks().begin(), testing::benchmark_tasks().begin() + 3);
    const auto oa = testing::sim_options(a.path());
    const auto full = render_report(run_benchmark(tasks, oa, testing::sim_env()), oa);

    const auto ob = testing::sim_options(b.path());
    run_benchmark(tasks, ob, testing::sim_env());
    // Keep the first 12 records and a torn one.
    const auto lines = split(read_text_file(b / "results.jsonl"), '\n');
    std::string kept;
    for (int i = 0; i < 12; ++i) kept += lines[static_cast<std::size_t>(i)] + "\n";
    kept += lines[12].substr(0, lines[12].size() / 2);
    write_text_file(b / "results.jsonl", kept);
    CHECK(ResultsStore(b / "results.jsonl").load().size() == 12);
    const auto resumed = render_report(run_benchmark(tasks, ob, testing::sim_env()), ob);
    CHECK(resumed == full);
    CHECK(ResultsStore(b / "results.jsonl").load().size() == 30);

    // Stored samples from another configuration are refused.
    auto other = ob;
    other.cfg.icot_level = 1;
    CHECK_ERROR_CODE(ErrorCode::ConfigError, run_benchmark(tasks, other, testing::sim_env()));
}

TEST_CASE("results store") {
    testing::TempDir dir;
    ResultsStore store(dir / "r.jsonl");
    CHECK(store.load().empty());
    metrics::RunSummary s;
    s.run_id = "T01-s00";
    s.requirement_id = "T01";
    s.score = 6;
    s.milestones.fill(true);
    s.milestones.back() = false;
    store.append("T01", 0, s);
    s.score = 7;
    s.milestones.back() = true;
    store.append("T01", 1, s);
    const auto got = store.load();
    REQUIRE(got.size() == 2);
    CHECK(got.at({"T01", 0}).score == 6);
    CHECK(got.at({"T01", 1}).score == 7);
}

TEST_CASE("aggregation") {
    const auto& task = testing::benchmark_tasks()[0];
    std::vector<metrics::RunSummary> samples(4);
    for (int i = 0; i < 4; ++i) {
        samples[static_cast<std::size_t>(i)].score = i == 0 ? 3 : 7;
        samples[static_cast<std::size_t>(i)].iterations[SubtaskKind::SimulationRun] = i;
        samples[static_cast<std::size_t>(i)].tokens.non_iteration = {1000, 200};
        samples[static_cast<std::size_t>(i)].tokens.iteration = {100 * i, 10 * i};
    }
    const auto r = aggregate_task(task, samples, 2, {});
    CHECK(r.flawless == 3);
    CHECK(r.executability == doctest::Approx(6.0));
    CHECK(r.pass_at_k == doctest::Approx(1.0));
    CHECK(r.iterations == doctest::Approx(1.5));
    CHECK(r.category_iterations.at(SubtaskKind::SimulationRun) == doctest::Approx(1.5));
    CHECK(r.prompt_tokens == doctest::Approx(1150));
    CHECK(r.completion_tokens == doctest::Approx(215));
    CHECK(r.iteration_tokens == doctest::Approx(165));
    CHECK(r.cost == doctest::Approx(metrics::cost(1150, 215, {})));
    CHECK_ERROR_CODE(ErrorCode::EmptyInput, aggregate_task(task, {}, 1, {}));
}

TEST_CASE("single-task report has an Average row equal to it") {
    testing::TempDir out;
    const auto o = testing::sim_options(out.path());
    const auto res = run_benchmark({testing::benchmark_tasks()[2]}, o, testing::sim_env());
    const auto table = metrics::parse_results_csv(results_csv(res));
    const auto m = metrics::column_means(table);
    CHECK(m.executability == doctest::Approx(res[0].executability));
    CHECK(m.tokens == doctest::Approx(res[0].tokens()));
    const auto report = render_report(res, o);
    const auto t3 = report.find("T03");
    const auto avg = report.find("Average");
    REQUIRE(t3 != std::string::npos);
    REQUIRE(avg != std::string::npos);
    CHECK_ERROR_CODE(ErrorCode::EmptyInput, render_report({}, o));
}

TEST_CASE("grid parsing") {
    CHECK(parse_grid("2:0, 2:1,2:2") == std::vector<GridPoint>{{2, 0}, {2, 1}, {2, 2}});
    CHECK(default_grid().size() == 6);
    for (const char* bad : {"", "2", "3:0", "2:4", "a:b", "2:1,2:1", "-1:0"}) {
        CHECK_ERROR_CODE(ErrorCode::ConfigError, parse_grid(bad));
    }
}

TEST_CASE("ablation on the reference family") {
    testing::TempDir out;
    const auto o = testing::sim_options(out.path());
    const auto rep = run_ablation(testing::benchmark_tasks(), default_grid(), o, testing::sim_env());
    REQUIRE(rep.points.size() == 6);
    REQUIRE(rep.sweeps.size() == 2);
    for (const auto& s : rep.sweeps) {
        CAPTURE(s.label);
        CHECK(s.nondecreasing);
        REQUIRE(s.fit);
        CHECK(s.fit->b > 0);
    }
    CHECK(rep.sweeps[0].label == "qdcot");
    CHECK(rep.sweeps[0].points.size() == 3);
    CHECK(rep.sweeps[1].points.size() == 4);
    // The icot = 0 point spends nothing on iterations and is left out of that fit.
    CHECK(rep.sweeps[1].fit->points == 3);

    const auto q0 = std::find_if(rep.points.begin(), rep.points.end(),
                                 [](const AblationPoint& p) { return p.point == GridPoint{0, 3}; });
    REQUIRE(q0 != rep.points.end());
    CHECK(q0->executability <= 3.0);
    for (const auto& r : q0->results) {
        for (const auto& s : r.samples) CHECK(s.score <= 3);
    }
    const auto full = std::find_if(rep.points.begin(), rep.points.end(),
                                   [](const AblationPoint& p) { return p.point == GridPoint{2, 3}; });
    CHECK(std::abs(full->executability - 6.3) <= 0.05);

    const auto text = render_ablation(rep, o);
    CHECK(text.find("DECREASES") == std::string::npos);
    CHECK(text.find("monotone") != std::string::npos);
    const auto path = write_ablation(rep, o, out / "abl");
    CHECK(read_text_file(path) == text);
    CHECK(split(read_text_file(out / "abl/ablation_points.csv"), '\n').size() == 8);

    const auto single = run_ablation(testing::benchmark_tasks(), {{2, 3}}, o, testing::sim_env());
    CHECK(single.sweeps.empty());
    CHECK(single.points[0].executability == doctest::Approx(full->executability));
}
