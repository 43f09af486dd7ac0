// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/cli/app.hpp"

#include "cotflow/agents/templates.hpp"
#include "cotflow/bench/ablation.hpp"
#include "cotflow/bench/benchmark.hpp"
#include "cotflow/bench/scenarios.hpp"
#include "cotflow/llm/http_backend.hpp"
#include "cotflow/llm/scripted.hpp"
#include "cotflow/metrics/results_table.hpp"
#include "cotflow/retrieval/corpus.hpp"
#include "cotflow/sandbox/executor.hpp"
#include "cotflow/scenario/script.hpp"
#include "cotflow/util.hpp"
#include "cotflow/workflow/engine.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>

#ifndef COTFLOW_DATA_DIR
#define COTFLOW_DATA_DIR "data"
#endif

namespace cotflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class MissingCredentials : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

fs::path data_dir() {
    if (const char* env = std::getenv("COTFLOW_DATA_DIR"); env && *env) return env;
    return COTFLOW_DATA_DIR;
}

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

template <typename T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        config_error("config key '" + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    const fs::path data = data_dir();
    cfg.benchmark = data / "benchmark.json";
    cfg.templates = data / "templates";
    cfg.corpus = data / "corpus" / "manifest.json";
    return cfg;
}

void apply_config(RunConfig& cfg, const json& j, const fs::path& base) {
    if (!j.is_object()) config_error("config must be a JSON object");
    auto path = [&](const json& v, const std::string& key) {
        const fs::path p = get_as<std::string>(v, key);
        return p.is_absolute() ? p : base / p;
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "mode") {
            cfg.mode = get_as<std::string>(v, key);
        } else if (key == "ablation") {
            if (!v.is_object()) config_error("config key 'ablation' must be an object");
            for (const auto& [k, x] : v.items()) {
                const std::string name = "ablation." + k;
                if (k == "qdcot_level") cfg.ablation.qdcot_level = get_as<int>(x, name);
                else if (k == "icot_level") cfg.ablation.icot_level = get_as<int>(x, name);
                else if (k == "max_iterations") cfg.ablation.max_iterations = get_as<int>(x, name);
                else if (k == "max_verification_rounds") cfg.ablation.max_verification_rounds = get_as<int>(x, name);
                else config_error("unknown config key '" + name + "'");
            }
        } else if (key == "pricing") {
            if (!v.is_object()) config_error("config key 'pricing' must be an object");
            for (const auto& [k, x] : v.items()) {
                const std::string name = "pricing." + k;
                if (k == "prompt_rate") cfg.pricing.prompt_rate = get_as<double>(x, name);
                else if (k == "completion_rate") cfg.pricing.completion_rate = get_as<double>(x, name);
                else config_error("unknown config key '" + name + "'");
            }
        } else if (key == "llm") {
            if (!v.is_object()) config_error("config key 'llm' must be an object");
            for (const auto& [k, x] : v.items()) {
                const std::string name = "llm." + k;
                if (k == "model") cfg.model = get_as<std::string>(x, name);
                else if (k == "temperature") cfg.temperature = get_as<double>(x, name);
                else if (k == "max_output_tokens") cfg.max_output_tokens = get_as<int>(x, name);
                else if (k == "base_url") cfg.base_url = get_as<std::string>(x, name);
                else if (k == "api_key_env") cfg.api_key_env = get_as<std::string>(x, name);
                else if (k == "timeout_s") cfg.request_timeout_s = get_as<int>(x, name);
                else if (k == "max_attempts") cfg.max_attempts = get_as<int>(x, name);
                else config_error("unknown config key '" + name + "'");
            }
        } else if (key == "embedding") {
            if (!v.is_object()) config_error("config key 'embedding' must be an object");
            for (const auto& [k, x] : v.items()) {
                const std::string name = "embedding." + k;
                if (k == "kind") cfg.embedder = get_as<std::string>(x, name);
                else if (k == "model") cfg.embedding_model = get_as<std::string>(x, name);
                else if (k == "dimension") cfg.embedding_dimension = get_as<std::size_t>(x, name);
                else config_error("unknown config key '" + name + "'");
            }
        } else if (key == "benchmark") {
            cfg.benchmark = path(v, key);
        } else if (key == "templates") {
            cfg.templates = path(v, key);
        } else if (key == "corpus") {
            cfg.corpus = path(v, key);
        } else if (key == "index") {
            cfg.index = path(v, key);
        } else if (key == "scenario") {
            cfg.scenario = path(v, key);
        } else if (key == "out") {
            cfg.out = path(v, key);
        } else if (key == "n") {
            cfg.n = get_as<int>(v, key);
        } else if (key == "k") {
            cfg.k = get_as<int>(v, key);
        } else if (key == "jobs") {
            cfg.jobs = get_as<int>(v, key);
        } else if (key == "threshold") {
            cfg.threshold = get_as<int>(v, key);
        } else if (key == "top_k") {
            cfg.top_k = get_as<std::size_t>(v, key);
        } else if (key == "context_budget") {
            cfg.context_budget = get_as<std::size_t>(v, key);
        } else if (key == "sandbox_timeout_s") {
            cfg.sandbox_timeout_s = get_as<int>(v, key);
        } else {
            config_error("unknown config key '" + key + "'");
        }
    }
}

namespace {

struct Flags {
    std::optional<std::string> mode;
    std::optional<std::string> config;
    std::optional<std::string> scenario;
    std::optional<int> n;
    std::optional<int> k;
    std::optional<int> qdcot;
    std::optional<int> icot;
    std::optional<int> max_iter;
    std::optional<std::string> out;
    std::optional<int> threshold;
    std::optional<int> jobs;
    std::optional<std::string> task;
    std::optional<std::string> grid;
    std::optional<std::string> benchmark;
    std::optional<std::string> corpus;
    std::optional<std::string> index;
    std::optional<std::string> table;
    std::optional<std::string> profiles;
    bool human_confirm = false;
    std::vector<std::string> positional;
};

RunConfig resolve_config(const Flags& f) {
    RunConfig cfg = default_config();
    if (f.config) {
        const fs::path p = *f.config;
        std::string text;
        try {
            text = read_text_file(p);
        } catch (const Error& e) {
            config_error(std::string("cannot read config: ") + e.what());
        }
        const json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) config_error(p.string() + ": not valid JSON");
        apply_config(cfg, j, p.has_parent_path() ? p.parent_path() : fs::path("."));
    }
    if (f.mode) cfg.mode = *f.mode;
    if (f.scenario) cfg.scenario = *f.scenario;
    if (f.n) cfg.n = *f.n;
    if (f.k) cfg.k = *f.k;
    if (f.qdcot) cfg.ablation.qdcot_level = *f.qdcot;
    if (f.icot) cfg.ablation.icot_level = *f.icot;
    if (f.max_iter) cfg.ablation.max_iterations = *f.max_iter;
    if (f.out) cfg.out = *f.out;
    if (f.threshold) cfg.threshold = *f.threshold;
    if (f.jobs) cfg.jobs = *f.jobs;
    if (f.benchmark) cfg.benchmark = *f.benchmark;
    if (f.corpus) cfg.corpus = *f.corpus;
    if (f.index) cfg.index = *f.index;

    if (!bench::parse_mode(cfg.mode)) config_error("mode must be 'simulated' or 'live'");
    if (cfg.embedder != "mock" && cfg.embedder != "http") config_error("embedding.kind must be 'mock' or 'http'");
    cfg.ablation.validate();
    cfg.pricing.validate();
    llm::LlmParams{cfg.model, cfg.temperature, cfg.max_output_tokens}.validate();
    if (cfg.n < 1) config_error("--n must be at least 1");
    if (cfg.k < 1 || cfg.k > cfg.n) config_error("--k must be in 1..n");
    if (cfg.jobs < 1) config_error("--jobs must be at least 1");
    if (cfg.threshold < 0 || cfg.threshold > 7) config_error("--threshold must be in 0..7");
    if (cfg.top_k < 1) config_error("top_k must be at least 1");
    if (cfg.request_timeout_s < 1 || cfg.max_attempts < 1 || cfg.sandbox_timeout_s < 1) {
        config_error("timeouts and attempt counts must be positive");
    }
    return cfg;
}

bool live(const RunConfig& cfg) { return cfg.mode == "live"; }

llm::HttpEndpoint endpoint(const RunConfig& cfg) {
    if (cfg.base_url.empty()) config_error("live services need llm.base_url in the config");
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key) throw MissingCredentials("environment variable " + cfg.api_key_env + " is not set");
    return {cfg.base_url, key, std::chrono::seconds(cfg.request_timeout_s)};
}

llm::RetryPolicy retry_policy(const RunConfig& cfg) {
    llm::RetryPolicy p;
    p.max_attempts = cfg.max_attempts;
    return p;
}

std::unique_ptr<retrieval::Embedder> make_embedder(const RunConfig& cfg) {
    if (cfg.embedder == "http") {
        return std::make_unique<retrieval::HttpEmbedder>(endpoint(cfg), cfg.embedding_model, cfg.embedding_dimension,
                                                         retry_policy(cfg));
    }
    return std::make_unique<retrieval::MockEmbedder>();
}

std::optional<retrieval::FlatIndex> make_index(const RunConfig& cfg, const retrieval::Embedder& embedder) {
    if (!cfg.index.empty()) return retrieval::load_index(cfg.index);
    if (cfg.corpus.empty()) return std::nullopt;
    return retrieval::index_corpus(retrieval::read_corpus(retrieval::load_manifest(cfg.corpus)), embedder);
}

/// Resources every workflow-running command shares.
struct Services {
    agents::TemplateStore templates;
    std::unique_ptr<retrieval::Embedder> embedder;
    std::optional<retrieval::FlatIndex> index;
    std::unique_ptr<llm::LlmBackend> live_backend;

    static Services make(const RunConfig& cfg) {
        Services s{agents::TemplateStore::load(cfg.templates), make_embedder(cfg), std::nullopt, nullptr};
        s.index = make_index(cfg, *s.embedder);
        if (live(cfg)) s.live_backend = std::make_unique<llm::HttpChatBackend>(endpoint(cfg), retry_policy(cfg));
        return s;
    }
};

llm::LlmParams params(const RunConfig& cfg) { return {cfg.model, cfg.temperature, cfg.max_output_tokens}; }

std::function<bool(const workflow::WorkflowTrace&)> confirm_callback(const Flags& f, std::ostream& out,
                                                                     std::istream& in) {
    if (!f.human_confirm) return {};
    return [&out, &in](const workflow::WorkflowTrace& trace) {
        out << "Accept the results of run " << trace.run_id << "? [y/N] " << std::flush;
        std::string answer;
        if (!std::getline(in, answer)) return false;
        const auto a = trim(answer);
        return a == "y" || a == "Y" || a == "yes";
    };
}

bench::BenchEnv bench_env(const RunConfig& cfg, const Services& s, const Flags& f, std::ostream& out,
                          std::istream& in) {
    bench::BenchEnv env;
    env.templates = &s.templates;
    env.index = s.index ? &*s.index : nullptr;
    env.embedder = s.embedder.get();
    env.params = params(cfg);
    env.top_k = cfg.top_k;
    env.context_budget = cfg.context_budget;
    if (live(cfg)) {
        env.clock = workflow::steady_clock();
        env.live_backend = s.live_backend.get();
        const int timeout = cfg.sandbox_timeout_s;
        env.live_executor = [timeout] {
            sandbox::ExecOptions opt;
            opt.timeout = std::chrono::seconds(timeout);
            return std::make_unique<sandbox::LiveExecutor>(sandbox::LiveCommands{}, opt);
        };
    }
    env.human_confirm = confirm_callback(f, out, in);
    return env;
}

bench::BenchOptions bench_options(const RunConfig& cfg, bool runs_samples = true) {
    bench::BenchOptions o;
    o.mode = *bench::parse_mode(cfg.mode);
    o.n = cfg.n;
    o.k = cfg.k;
    o.cfg = cfg.ablation;
    o.pricing = cfg.pricing;
    o.out_dir = cfg.out;
    o.scenario_dir = cfg.scenario;
    o.jobs = cfg.jobs;
    if (runs_samples && o.mode == bench::Mode::Simulated && o.scenario_dir.empty()) {
        config_error("simulated mode needs --scenario <directory>");
    }
    return o;
}

std::vector<bench::BenchTask> select_tasks(const RunConfig& cfg, const Flags& f) {
    auto tasks = bench::load_benchmark(cfg.benchmark);
    if (!f.task) return tasks;
    std::vector<bench::BenchTask> picked;
    for (const auto& id : split(*f.task, ',')) {
        const auto it = std::find_if(tasks.begin(), tasks.end(), [&](const auto& t) { return t.id == trim(id); });
        if (it == tasks.end()) config_error("no benchmark task '" + std::string(trim(id)) + "'");
        picked.push_back(*it);
    }
    return picked;
}

int cmd_run(const Flags& f, std::ostream& out, std::ostream& err, std::istream& in) {
    const RunConfig cfg = resolve_config(f);
    workflow::Requirement req;
    if (f.task) {
        if (f.task->find(',') != std::string::npos) config_error("run takes a single --task");
        const auto t = select_tasks(cfg, f).front();
        req = t.as_requirement();
    } else {
        const std::string joined = join(f.positional, " ");
        if (!joined.empty() && joined.front() == '@') {
            req.text = read_text_file(joined.substr(1));
        } else {
            req.text = joined;
        }
        req.id = "run";
        if (trim(req.text).empty()) {
            err << "run: give a requirement text, @file or --task\n";
            return kExitUsage;
        }
    }

    std::optional<scenario::ScenarioScript> script;
    if (!live(cfg)) {
        if (cfg.scenario.empty()) config_error("simulated mode needs --scenario <file>");
        std::error_code ec;
        if (!fs::is_regular_file(cfg.scenario, ec)) {
            throw Error(ErrorCode::MissingScenarioEntry, "no scenario file " + cfg.scenario.string());
        }
        script = scenario::load_scenario(cfg.scenario);
    }
    Services services = Services::make(cfg);
    std::unique_ptr<llm::LlmBackend> scripted;
    std::unique_ptr<sandbox::Executor> executor;
    workflow::WorkflowDeps deps;
    if (script) {
        scripted = std::make_unique<llm::ScriptedBackend>(script->responses);
        executor = std::make_unique<sandbox::SimulatedExecutor>(*script);
        deps.backend = scripted.get();
    } else {
        sandbox::ExecOptions opt;
        opt.timeout = std::chrono::seconds(cfg.sandbox_timeout_s);
        executor = std::make_unique<sandbox::LiveExecutor>(sandbox::LiveCommands{}, opt);
        deps.backend = services.live_backend.get();
        deps.clock = workflow::steady_clock();
    }
    deps.executor = executor.get();
    deps.templates = &services.templates;
    deps.index = services.index ? &*services.index : nullptr;
    deps.embedder = services.embedder.get();
    deps.params = params(cfg);
    deps.top_k = cfg.top_k;
    deps.context_budget = cfg.context_budget;
    const std::string run_id = req.id;
    deps.run_dir = cfg.out / "runs" / run_id;
    deps.human_confirm = confirm_callback(f, out, in);

    const auto trace = workflow::run_workflow(req, cfg.ablation, deps, run_id);
    const int score = trace.score();
    out << "executability: " << score << "\n";
    out << "trace: " << (deps.run_dir / "trace.jsonl").string() << "\n";
    for (const auto& a : trace.artifacts) out << "artifact: " << a << "\n";
    if (trace.budget_exhausted) {
        err << "iteration budget exhausted in " << to_string(*trace.budget_exhausted) << "\n";
    }
    if (trace.abort) err << "run aborted: " << to_string(trace.abort->code) << ": " << trace.abort->message << "\n";
    return score >= cfg.threshold ? kExitOk : kExitBelowThreshold;
}

double mean_executability(const std::vector<bench::BenchResult>& results) {
    double sum = 0.0;
    for (const auto& r : results) sum += r.executability;
    return results.empty() ? 0.0 : sum / static_cast<double>(results.size());
}

int cmd_bench(const Flags& f, std::ostream& out, std::ostream& /*err*/, std::istream& in) {
    const RunConfig cfg = resolve_config(f);
    const auto tasks = select_tasks(cfg, f);
    const auto options = bench_options(cfg);
    Services services = Services::make(cfg);
    const auto results = bench::run_benchmark(tasks, options, bench_env(cfg, services, f, out, in));
    const auto report = bench::write_report(results, options, cfg.out);
    const double avg = mean_executability(results);
    out << "report: " << report.string() << "\n";
    out << "average executability: " << format_fixed(avg, 2) << "\n";
    return avg >= cfg.threshold ? kExitOk : kExitBelowThreshold;
}

int cmd_ablate(const Flags& f, std::ostream& out, std::ostream& /*err*/, std::istream& in) {
    const RunConfig cfg = resolve_config(f);
    const auto tasks = select_tasks(cfg, f);
    const auto grid = f.grid ? bench::parse_grid(*f.grid) : bench::default_grid();
    const auto options = bench_options(cfg);
    Services services = Services::make(cfg);
    const auto report = bench::run_ablation(tasks, grid, options, bench_env(cfg, services, f, out, in));
    const auto path = bench::write_ablation(report, options, cfg.out);
    out << "report: " << path.string() << "\n";
    for (const auto& s : report.sweeps) {
        out << s.label << " sweep: " << (s.nondecreasing ? "nondecreasing" : "decreasing") << "\n";
    }
    return kExitOk;
}

int cmd_report(const Flags& f, std::ostream& out, std::ostream& /*err*/, std::istream& /*in*/) {
    const RunConfig cfg = resolve_config(f);
    if (f.table) {
        const auto table = metrics::load_results_csv(*f.table);
        const auto m = metrics::column_means(table);
        out << "rows: " << table.rows.size() << "\n";
        out << "mean executability: " << format_fixed(m.executability, 2) << "\n";
        out << "mean token usage: " << format_fixed(m.tokens, 1) << "\n";
        out << "mean iterations: " << format_fixed(m.iterations, 2) << "\n";
        out << "mean pass@1 (%): " << format_fixed(m.pass_at_1, 2) << "\n";
        const auto findings = metrics::cross_check(table);
        if (findings.empty()) out << "all checks passed\n";
        for (const auto& x : findings) out << "- " << x.describe() << "\n";
        return findings.empty() ? kExitOk : kExitBelowThreshold;
    }
    const auto tasks = select_tasks(cfg, f);
    bench::BenchOptions options = bench_options(cfg, false);
    const auto stored = bench::ResultsStore(cfg.out / "results.jsonl").load();
    std::vector<bench::BenchResult> results;
    for (const auto& t : tasks) {
        std::vector<metrics::RunSummary> samples;
        for (int s = 0; s < cfg.n; ++s) {
            const auto it = stored.find({t.id, s});
            if (it == stored.end()) {
                throw Error(ErrorCode::ConfigError, "results store lacks " + bench::run_id_for(t.id, s));
            }
            samples.push_back(it->second);
        }
        results.push_back(bench::aggregate_task(t, std::move(samples), cfg.k, cfg.pricing));
    }
    const auto report = bench::write_report(results, options, cfg.out);
    out << "report: " << report.string() << "\n";
    return kExitOk;
}

int cmd_index(const Flags& f, std::ostream& out, std::ostream& /*err*/, std::istream& /*in*/) {
    RunConfig cfg = resolve_config(f);
    cfg.index.clear();
    const auto embedder = make_embedder(cfg);
    const auto index = retrieval::index_corpus(retrieval::read_corpus(retrieval::load_manifest(cfg.corpus)), *embedder);
    const fs::path target = cfg.out.extension() == ".json" ? cfg.out : cfg.out / "index.json";
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    retrieval::save_index(index, target);
    out << "indexed " << index.size() << " cases (dimension " << index.dimension() << "): " << target.string()
        << "\n";
    return kExitOk;
}

int cmd_gen_scenarios(const Flags& f, std::ostream& out, std::ostream& /*err*/, std::istream& /*in*/) {
    const RunConfig cfg = resolve_config(f);
    const auto tasks = select_tasks(cfg, f);
    const fs::path table = f.profiles ? fs::path(*f.profiles) : data_dir() / "reference_tables.csv";
    const auto profiles = bench::profiles_from_table(metrics::load_results_csv(table));
    const std::size_t written = bench::write_scenario_family(tasks, profiles, cfg.n, cfg.out, cfg.ablation);
    out << "wrote " << written << " scenarios under " << cfg.out.string() << "\n";
    return kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::SchemaError:
        case ErrorCode::TemplateError:
        case ErrorCode::DimensionMismatch:
            return kExitConfig;
        case ErrorCode::MissingScenarioEntry: return kExitMissingScenario;
        default: return kExitRuntime;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    CLI::App app{"cotflow: decomposed, self-correcting CFD workflow runner and benchmark harness"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON config file");
        sub->add_option("--mode", f.mode, "simulated or live");
        sub->add_option("--scenario", f.scenario, "scenario file (run) or directory (bench, ablate)");
        sub->add_option("--n", f.n, "samples per task");
        sub->add_option("--k", f.k, "k of pass@k");
        sub->add_option("--qdcot", f.qdcot, "decomposition level 0..2");
        sub->add_option("--icot", f.icot, "reviewer level 0..3");
        sub->add_option("--max-iter", f.max_iter, "iteration budget per subtask kind");
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--threshold", f.threshold, "minimum executability for exit status 0");
        sub->add_option("--jobs", f.jobs, "concurrent benchmark samples");
        sub->add_option("--task", f.task, "benchmark task id(s), comma separated");
        sub->add_option("--benchmark", f.benchmark, "benchmark task file");
        sub->add_option("--corpus", f.corpus, "corpus manifest");
        sub->add_option("--index", f.index, "prebuilt index file");
        sub->add_flag("--human-confirm", f.human_confirm, "ask on stdin for the last rung when there is no oracle");
    };
    auto* run = app.add_subcommand("run", "run one requirement");
    common(run);
    run->add_option("requirement", f.positional, "requirement text or @file");
    auto* bench = app.add_subcommand("bench", "run the benchmark and write the report");
    common(bench);
    auto* ablate = app.add_subcommand("ablate", "sweep decomposition and reviewer levels");
    common(ablate);
    ablate->add_option("--grid", f.grid, "grid points as qdcot:icot,...");
    auto* report = app.add_subcommand("report", "re-render a report or check a results table");
    common(report);
    report->add_option("--table", f.table, "results table CSV to cross-check");
    auto* index = app.add_subcommand("index", "embed a corpus and save the index");
    common(index);
    auto* gen = app.add_subcommand("gen-scenarios", "write a synthetic scenario family");
    common(gen);
    gen->add_option("--profiles", f.profiles, "per-task target table CSV");

    std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(f, out, err, in);
        if (bench->parsed()) return cmd_bench(f, out, err, in);
        if (ablate->parsed()) return cmd_ablate(f, out, err, in);
        if (report->parsed()) return cmd_report(f, out, err, in);
        if (index->parsed()) return cmd_index(f, out, err, in);
        if (gen->parsed()) return cmd_gen_scenarios(f, out, err, in);
    } catch (const MissingCredentials& e) {
        err << "missing credentials: " << e.what() << "\n";
        return kExitMissingCredentials;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace cotflow::cli
