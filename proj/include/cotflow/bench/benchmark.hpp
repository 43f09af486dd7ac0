// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/agents/templates.hpp"
#include "cotflow/llm/backend.hpp"
#include "cotflow/metrics/metrics.hpp"
#include "cotflow/metrics/run_summary.hpp"
#include "cotflow/retrieval/embedding.hpp"
#include "cotflow/retrieval/index.hpp"
#include "cotflow/sandbox/executor.hpp"
#include "cotflow/workflow/trace.hpp"
#include "cotflow/workflow/trace_log.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cotflow::bench {

enum class PostKind { Extraction, Visualization };

std::string_view to_string(PostKind kind);

struct BenchTask {
    std::string id;           // T01..T13
    std::string requirement;  // verbatim user requirement
    std::string sim_case;
    std::string post_task;  // short label, e.g. "Extract max Yplus"
    PostKind post_kind = PostKind::Extraction;
    workflow::OraclePredicate oracle;

    workflow::Requirement as_requirement() const { return {id, requirement, oracle}; }
};

inline constexpr std::size_t kBenchmarkTaskCount = 13;

/// {"format": "cotflow-benchmark", "version": 1, "notes": [...],
///  "tasks": [{"id", "sim_case", "post_task", "post_kind", "requirement", "oracle"}]}
/// Exactly 13 tasks with unique ids; throws Error(SchemaError) naming the field.
std::vector<BenchTask> parse_benchmark(const std::string& text, const std::string& where = "benchmark");
std::vector<BenchTask> load_benchmark(const std::filesystem::path& path);

enum class Mode { Simulated, Live };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

struct BenchOptions {
    Mode mode = Mode::Simulated;
    int n = 10;
    int k = 1;
    workflow::AblationConfig cfg;
    metrics::PricingConfig pricing;
    std::filesystem::path out_dir;
    /// Simulated mode: <scenario_dir>/<task id>/sNN.json
    std::filesystem::path scenario_dir;
    int jobs = 1;

    void validate() const;
};

/// Everything a run needs apart from the per-sample backend and executor.
struct BenchEnv {
    const agents::TemplateStore* templates = nullptr;
    const retrieval::FlatIndex* index = nullptr;
    const retrieval::Embedder* embedder = nullptr;
    llm::LlmParams params;
    std::size_t top_k = 1;
    std::size_t context_budget = 12'000;
    workflow::Clock clock;  // leave empty for reproducible logs
    /// Live mode only.
    llm::LlmBackend* live_backend = nullptr;
    std::function<std::unique_ptr<sandbox::Executor>()> live_executor;
    std::function<bool(const workflow::WorkflowTrace&)> human_confirm;
};

std::string run_id_for(const std::string& task_id, int sample);
std::filesystem::path scenario_path(const std::filesystem::path& dir, const std::string& task_id, int sample);

struct BenchResult {
    std::string task_id;
    std::string sim_case;
    std::string post_task;
    std::vector<metrics::RunSummary> samples;  // sample order
    int k = 1;
    int flawless = 0;  // c
    double executability = 0.0;
    double iterations = 0.0;
    std::map<SubtaskKind, double> category_iterations;
    double prompt_tokens = 0.0;
    double completion_tokens = 0.0;
    double non_iteration_tokens = 0.0;
    double iteration_tokens = 0.0;
    double pass_at_k = 0.0;
    double cost = 0.0;

    double tokens() const { return prompt_tokens + completion_tokens; }
};

/// Means over exactly `samples`; Error(EmptyInput) when there are none.
BenchResult aggregate_task(const BenchTask& task, std::vector<metrics::RunSummary> samples, int k,
                           const metrics::PricingConfig& pricing);

/// Append-only JSON-lines store of finished samples, safe for concurrent appends.
class ResultsStore {
public:
    explicit ResultsStore(std::filesystem::path path);

    /// Summaries already present, keyed by (task id, sample).
    std::map<std::pair<std::string, int>, metrics::RunSummary> load() const;
    void append(const std::string& task_id, int sample, const metrics::RunSummary& summary);

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

/// n runs per task (skipping pairs already in <out>/results.jsonl), then
/// aggregation in task order. Each run writes <out>/runs/<run id>/.
std::vector<BenchResult> run_benchmark(const std::vector<BenchTask>& tasks, const BenchOptions& options,
                                       const BenchEnv& env);

/// Per-task table in the layout parse_results_csv() reads.
std::string results_csv(const std::vector<BenchResult>& results);

/// Plain-text report: the two result tables with Average rows, the cost
/// line and the consistency findings. Contains no timestamps or paths.
std::string render_report(const std::vector<BenchResult>& results, const BenchOptions& options);

/// Writes report.txt, results_table.csv and executability_vs_tokens.csv
/// under `dir`; returns the report path.
std::filesystem::path write_report(const std::vector<BenchResult>& results, const BenchOptions& options,
                                   const std::filesystem::path& dir);

}  // namespace cotflow::bench
