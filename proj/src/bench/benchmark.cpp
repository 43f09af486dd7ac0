// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/bench/benchmark.hpp"

#include "cotflow/llm/scripted.hpp"
#include "cotflow/metrics/results_table.hpp"
#include "cotflow/scenario/script.hpp"
#include "cotflow/util.hpp"
#include "cotflow/workflow/engine.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

namespace cotflow::bench {

using nlohmann::json;

std::string_view to_string(PostKind kind) {
    return kind == PostKind::Extraction ? "Extraction" : "Visualization";
}

std::string_view to_string(Mode mode) { return mode == Mode::Simulated ? "simulated" : "live"; }

std::optional<Mode> parse_mode(std::string_view text) {
    if (text == "simulated") return Mode::Simulated;
    if (text == "live") return Mode::Live;
    return std::nullopt;
}

std::vector<BenchTask> parse_benchmark(const std::string& text, const std::string& where) {
    const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::SchemaError, where + ": not a JSON object");
    if (doc.value("format", std::string()) != "cotflow-benchmark") {
        throw Error(ErrorCode::SchemaError, where + ".format: expected \"cotflow-benchmark\"");
    }
    if (doc.value("version", 0) != 1) throw Error(ErrorCode::SchemaError, where + ".version: expected 1");
    if (!doc.contains("tasks") || !doc["tasks"].is_array()) {
        throw Error(ErrorCode::SchemaError, where + ".tasks: array required");
    }
    const auto& arr = doc["tasks"];
    if (arr.size() != kBenchmarkTaskCount) {
        throw Error(ErrorCode::SchemaError, where + ".tasks: expected " + std::to_string(kBenchmarkTaskCount) +
                                                " tasks, found " + std::to_string(arr.size()));
    }
    std::vector<BenchTask> tasks;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = where + ".tasks[" + std::to_string(i) + "]";
        const auto& t = arr[i];
        if (!t.is_object()) throw Error(ErrorCode::SchemaError, at + ": object required");
        auto str = [&](const char* key) {
            if (!t.contains(key) || !t[key].is_string() || t[key].get<std::string>().empty()) {
                throw Error(ErrorCode::SchemaError, at + "." + key + ": non-empty string required");
            }
            return t[key].get<std::string>();
        };
        BenchTask task;
        task.id = str("id");
        task.requirement = str("requirement");
        task.sim_case = str("sim_case");
        task.post_task = str("post_task");
        const std::string kind = str("post_kind");
        if (kind == "Extraction") {
            task.post_kind = PostKind::Extraction;
        } else if (kind == "Visualization") {
            task.post_kind = PostKind::Visualization;
        } else {
            throw Error(ErrorCode::SchemaError, at + ".post_kind: Extraction or Visualization");
        }
        if (!t.contains("oracle")) throw Error(ErrorCode::SchemaError, at + ".oracle: required");
        task.oracle = workflow::oracle_from_json(t["oracle"], at + ".oracle");
        if (!ids.insert(task.id).second) throw Error(ErrorCode::SchemaError, at + ".id: duplicate " + task.id);
        tasks.push_back(std::move(task));
    }
    return tasks;
}

std::vector<BenchTask> load_benchmark(const std::filesystem::path& path) {
    return parse_benchmark(read_text_file(path), path.string());
}

void BenchOptions::validate() const {
    if (n < 1) throw Error(ErrorCode::ConfigError, "n must be at least 1");
    if (k < 1 || k > n) throw Error(ErrorCode::ConfigError, "k must be in 1..n");
    if (jobs < 1) throw Error(ErrorCode::ConfigError, "jobs must be at least 1");
    if (out_dir.empty()) throw Error(ErrorCode::ConfigError, "output directory is required");
    if (mode == Mode::Simulated && scenario_dir.empty()) {
        throw Error(ErrorCode::ConfigError, "simulated mode needs a scenario directory");
    }
    cfg.validate();
    pricing.validate();
}

std::string run_id_for(const std::string& task_id, int sample) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "-s%02d", sample);
    return task_id + buf;
}

std::filesystem::path scenario_path(const std::filesystem::path& dir, const std::string& task_id, int sample) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%02d.json", sample);
    return dir / task_id / buf;
}

BenchResult aggregate_task(const BenchTask& task, std::vector<metrics::RunSummary> samples, int k,
                           const metrics::PricingConfig& pricing) {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "task " + task.id + " has no samples");
    BenchResult r;
    r.task_id = task.id;
    r.sim_case = task.sim_case;
    r.post_task = task.post_task;
    r.k = k;
    const double n = static_cast<double>(samples.size());
    for (SubtaskKind kind : kAllSubtaskKinds) r.category_iterations[kind] = 0.0;
    for (const auto& s : samples) {
        r.executability += s.score;
        r.iterations += s.total_iterations();
        for (const auto& [kind, count] : s.iterations) r.category_iterations[kind] += count;
        r.prompt_tokens += static_cast<double>(s.tokens.prompt());
        r.completion_tokens += static_cast<double>(s.tokens.completion());
        r.non_iteration_tokens += static_cast<double>(s.tokens.non_iteration.total());
        r.iteration_tokens += static_cast<double>(s.tokens.iteration.total());
        if (s.flawless()) ++r.flawless;
    }
    r.executability /= n;
    r.iterations /= n;
    for (auto& [kind, v] : r.category_iterations) v /= n;
    r.prompt_tokens /= n;
    r.completion_tokens /= n;
    r.non_iteration_tokens /= n;
    r.iteration_tokens /= n;
    r.pass_at_k = metrics::pass_at_k({static_cast<int>(samples.size()), r.flawless, std::min<int>(k, static_cast<int>(samples.size()))});
    r.cost = metrics::cost(r.prompt_tokens, r.completion_tokens, pricing);
    r.samples = std::move(samples);
    return r;
}

ResultsStore::ResultsStore(std::filesystem::path path) : path_(std::move(path)) {}

std::map<std::pair<std::string, int>, metrics::RunSummary> ResultsStore::load() const {
    std::map<std::pair<std::string, int>, metrics::RunSummary> out;
    std::error_code ec;
    if (!std::filesystem::exists(path_, ec)) return out;
    int line_no = 0;
    for (const auto& line : split(read_text_file(path_), '\n')) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = path_.string() + ":" + std::to_string(line_no);
        const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        // A torn final line from an interrupted batch is dropped; its sample reruns.
        if (j.is_discarded()) continue;
        if (!j.is_object() || !j.contains("task") || !j.contains("sample") || !j.contains("summary")) {
            throw Error(ErrorCode::SchemaError, where + ": expected task, sample and summary");
        }
        out[{j["task"].get<std::string>(), j["sample"].get<int>()}] = metrics::run_summary_from_json(j["summary"], where);
    }
    return out;
}

void ResultsStore::append(const std::string& task_id, int sample, const metrics::RunSummary& summary) {
    const std::string line = json{{"task", task_id}, {"sample", sample}, {"summary", metrics::to_json(summary)}}.dump();
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    bool torn = false;
    if (std::ifstream in(path_, std::ios::binary | std::ios::ate); in && in.tellg() > 0) {
        in.seekg(-1, std::ios::end);
        torn = in.get() != '\n';
    }
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (torn) out << '\n';  // close a line left open by an interrupted writer
    out << line << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path_.string());
}

std::vector<BenchResult> run_benchmark(const std::vector<BenchTask>& tasks, const BenchOptions& options,
                                       const BenchEnv& env) {
    options.validate();
    if (!env.templates) throw Error(ErrorCode::ConfigError, "benchmark needs a template store");
    if (options.mode == Mode::Live && (!env.live_backend || !env.live_executor)) {
        throw Error(ErrorCode::ConfigError, "live mode needs a backend and an executor");
    }
    ResultsStore store(options.out_dir / "results.jsonl");
    const auto done = store.load();
    for (const auto& [key, summary] : done) {
        if (summary.qdcot_level != options.cfg.qdcot_level || summary.icot_level != options.cfg.icot_level) {
            throw Error(ErrorCode::ConfigError,
                        store.path().string() + " holds results of a different configuration");
        }
    }

    struct Job {
        const BenchTask* task;
        int sample;
    };
    std::vector<Job> jobs;
    for (const auto& t : tasks) {
        for (int s = 0; s < options.n; ++s) {
            if (done.contains({t.id, s})) continue;
            if (options.mode == Mode::Simulated) {
                const auto path = scenario_path(options.scenario_dir, t.id, s);
                std::error_code ec;
                if (!std::filesystem::is_regular_file(path, ec)) {
                    throw Error(ErrorCode::MissingScenarioEntry, "no scenario " + path.string());
                }
            }
            jobs.push_back({&t, s});
        }
    }

    auto run_one = [&](const Job& job) {
        const std::string run_id = run_id_for(job.task->id, job.sample);
        workflow::WorkflowDeps deps;
        deps.templates = env.templates;
        deps.index = env.index;
        deps.embedder = env.embedder;
        deps.params = env.params;
        deps.top_k = env.top_k;
        deps.context_budget = env.context_budget;
        deps.run_dir = options.out_dir / "runs" / run_id;
        deps.clock = env.clock;
        deps.human_confirm = env.human_confirm;
        workflow::WorkflowTrace trace;
        if (options.mode == Mode::Simulated) {
            const auto script = scenario::load_scenario(scenario_path(options.scenario_dir, job.task->id, job.sample));
            llm::ScriptedBackend backend(script.responses);
            sandbox::SimulatedExecutor executor(script);
            deps.backend = &backend;
            deps.executor = &executor;
            trace = workflow::run_workflow(job.task->as_requirement(), options.cfg, deps, run_id);
        } else {
            auto executor = env.live_executor();
            deps.backend = env.live_backend;
            deps.executor = executor.get();
            trace = workflow::run_workflow(job.task->as_requirement(), options.cfg, deps, run_id);
        }
        store.append(job.task->id, job.sample, metrics::summarize_trace(trace));
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                run_one(jobs[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), std::max<std::size_t>(jobs.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const auto all = store.load();
    std::vector<BenchResult> results;
    for (const auto& t : tasks) {
        std::vector<metrics::RunSummary> samples;
        for (int s = 0; s < options.n; ++s) samples.push_back(all.at({t.id, s}));
        results.push_back(aggregate_task(t, std::move(samples), options.k, options.pricing));
    }
    return results;
}

namespace {

struct Column {
    std::string header;
    bool numeric;
};

std::string render_table(const std::vector<Column>& cols, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        width[c] = cols[c].header.size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const std::string pad(width[c] - cells[c].size(), ' ');
            out += cols[c].numeric ? pad + cells[c] : cells[c] + pad;
            if (c + 1 < cols.size()) out += "  ";
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out + "\n";
    };
    std::vector<std::string> header;
    for (const auto& c : cols) header.push_back(c.header);
    std::string out = line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (cols.size() - 1), '-') + "\n";
    for (const auto& r : rows) out += line(r);
    return out;
}

struct Averages {
    double executability = 0, tokens = 0, iterations = 0, pass = 0, sim = 0, post = 0, script = 0, prompt = 0,
           completion = 0, cost = 0;
};

Averages averages(const std::vector<BenchResult>& results) {
    Averages a;
    for (const auto& r : results) {
        a.executability += r.executability;
        a.tokens += r.tokens();
        a.iterations += r.iterations;
        a.pass += r.pass_at_k;
        a.sim += r.category_iterations.at(SubtaskKind::SimulationRun);
        a.post += r.category_iterations.at(SubtaskKind::PostprocessCommand);
        a.script += r.category_iterations.at(SubtaskKind::PostprocessScript);
        a.prompt += r.prompt_tokens;
        a.completion += r.completion_tokens;
        a.cost += r.cost;
    }
    const double n = static_cast<double>(results.size());
    for (double* v : {&a.executability, &a.tokens, &a.iterations, &a.pass, &a.sim, &a.post, &a.script, &a.prompt,
                      &a.completion, &a.cost}) {
        *v /= n;
    }
    return a;
}

}  // namespace

std::string results_csv(const std::vector<BenchResult>& results) {
    std::string out =
        "task_id,sim_case,post_task,executability,tokens,iterations,pass_at_1,sim_iterations,post_iterations,"
        "script_iterations,prompt_tokens,completion_tokens\n";
    auto num = [](double v) { return format_fixed(v, 6); };
    for (const auto& r : results) {
        out += r.task_id + "," + r.sim_case + ",\"" + r.post_task + "\"," + num(r.executability) + "," +
               num(r.tokens()) + "," + num(r.iterations) + "," + num(100.0 * r.pass_at_k) + "," +
               num(r.category_iterations.at(SubtaskKind::SimulationRun)) + "," +
               num(r.category_iterations.at(SubtaskKind::PostprocessCommand)) + "," +
               num(r.category_iterations.at(SubtaskKind::PostprocessScript)) + "," + num(r.prompt_tokens) + "," +
               num(r.completion_tokens) + "\n";
    }
    return out;
}

std::string render_report(const std::vector<BenchResult>& results, const BenchOptions& options) {
    if (results.empty()) throw Error(ErrorCode::EmptyInput, "no benchmark results to report");
    const Averages avg = averages(results);
    const std::string pass_header = "Pass@" + std::to_string(options.k) + " (%)";
    std::string out = "cotflow benchmark report\n";
    out += "mode: " + std::string(to_string(options.mode)) + "  samples per task: " + std::to_string(options.n) +
           "  k: " + std::to_string(options.k) + "  qdcot: " + std::to_string(options.cfg.qdcot_level) +
           "  icot: " + std::to_string(options.cfg.icot_level) +
           "  max iterations: " + std::to_string(options.cfg.max_iterations) + "\n\n";

    out += "Per-task results: executability, token usage, iterations and pass rate (means over samples)\n";
    std::vector<std::vector<std::string>> t1;
    for (const auto& r : results) {
        t1.push_back({r.task_id, r.sim_case, r.post_task, format_fixed(r.executability, 1), format_fixed(r.tokens(), 1),
                      format_fixed(r.iterations, 1), format_fixed(100.0 * r.pass_at_k, 1)});
    }
    t1.push_back({"Average", "", "", format_fixed(avg.executability, 1), format_fixed(avg.tokens, 1),
                  format_fixed(avg.iterations, 1), format_fixed(100.0 * avg.pass, 1)});
    out += render_table({{"Task", false},
                         {"Simulation Task", false},
                         {"Postprocessing Task", false},
                         {"Executability (Max: 7)", true},
                         {"Token Usage", true},
                         {"Iterations (Max: " + std::to_string(options.cfg.max_iterations) + ")", true},
                         {pass_header, true}},
                        t1);

    out += "\nBreakdown: iterations by category and tokens by direction (means over samples)\n";
    std::vector<std::vector<std::string>> t2;
    for (const auto& r : results) {
        t2.push_back({r.task_id, format_fixed(r.category_iterations.at(SubtaskKind::SimulationRun), 2),
                      format_fixed(r.category_iterations.at(SubtaskKind::PostprocessCommand), 2),
                      format_fixed(r.category_iterations.at(SubtaskKind::PostprocessScript), 2),
                      format_fixed(r.prompt_tokens, 1), format_fixed(r.completion_tokens, 1)});
    }
    t2.push_back({"Average", format_fixed(avg.sim, 2), format_fixed(avg.post, 2), format_fixed(avg.script, 2),
                  format_fixed(avg.prompt, 1), format_fixed(avg.completion, 1)});
    out += render_table({{"Task", false},
                         {"Simulation Iterations", true},
                         {"Postprocessing Iterations", true},
                         {"Python Script Iterations", true},
                         {"Prompt Tokens", true},
                         {"Completion Tokens", true}},
                        t2);

    out += "\nCost: " + format_fixed(avg.cost, 4) + " per case at " + format_fixed(options.pricing.prompt_rate, 2) +
           " / " + format_fixed(options.pricing.completion_rate, 2) + " per 1M prompt / completion tokens\n";

    out += "\nFindings\n";
    const auto findings = metrics::cross_check(metrics::parse_results_csv(results_csv(results)));
    if (findings.empty()) {
        out += "all checks passed\n";
    } else {
        for (const auto& f : findings) out += "- " + f.describe() + "\n";
    }
    return out;
}

std::filesystem::path write_report(const std::vector<BenchResult>& results, const BenchOptions& options,
                                   const std::filesystem::path& dir) {
    const auto report = dir / "report.txt";
    write_text_file(report, render_report(results, options));
    write_text_file(dir / "results_table.csv", results_csv(results));
    std::string plot = "task_id,executability,tokens,non_iteration_tokens,iteration_tokens\n";
    for (const auto& r : results) {
        plot += r.task_id + "," + format_fixed(r.executability, 6) + "," + format_fixed(r.tokens(), 6) + "," +
                format_fixed(r.non_iteration_tokens, 6) + "," + format_fixed(r.iteration_tokens, 6) + "\n";
    }
    write_text_file(dir / "executability_vs_tokens.csv", plot);
    return report;
}

}  // namespace cotflow::bench
