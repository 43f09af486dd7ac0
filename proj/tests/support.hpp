// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/agents/templates.hpp"
#include "cotflow/bench/benchmark.hpp"
#include "cotflow/llm/scripted.hpp"
#include "cotflow/sandbox/executor.hpp"
#include "cotflow/scenario/builder.hpp"
#include "cotflow/workflow/engine.hpp"

#include <cstdlib>
#include <functional>
#include <optional>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace cotflow::testing {

inline std::filesystem::path data_dir() { return COTFLOW_DATA_DIR; }

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "cotflow-test-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline const agents::TemplateStore& templates() {
    static const auto store = agents::TemplateStore::load(data_dir() / "templates");
    return store;
}

inline const std::vector<bench::BenchTask>& benchmark_tasks() {
    static const auto tasks = bench::load_benchmark(data_dir() / "benchmark.json");
    return tasks;
}

inline const std::string kPitzYplus =
    "do a RANS simulation of incompressible pitzDaily flow using pimpleFoam and extract max yplus at latest time "
    "through post-processing.";

inline workflow::OraclePredicate yplus_oracle() {
    return {workflow::OraclePredicate::Kind::ScalarInRange, "max_yplus", 1e-6, 1000.0};
}

struct ScriptedRun {
    workflow::WorkflowTrace trace;
    std::vector<llm::CallKey> unconsumed;
    std::vector<std::string> prompts;
};

/// Runs `script` through the real engine with a scripted backend and the
/// simulated executor, no retrieval and a null clock.
inline ScriptedRun run_scripted(const scenario::ScenarioScript& script, const workflow::Requirement& req,
                                const workflow::AblationConfig& cfg, const std::filesystem::path& run_dir,
                                const std::string& run_id = "run") {
    llm::ScriptedBackend backend(script.responses);
    sandbox::SimulatedExecutor executor(script);
    workflow::WorkflowDeps deps;
    deps.backend = &backend;
    deps.executor = &executor;
    deps.templates = &templates();
    deps.run_dir = run_dir;
    ScriptedRun out;
    out.trace = workflow::run_workflow(req, cfg, deps, run_id);
    out.unconsumed = backend.unconsumed();
    out.prompts = backend.prompts();
    return out;
}

/// Builds the scenario for `plan` at the full configuration and replays it under `cfg`.
inline ScriptedRun run_plan(const scenario::FailurePlan& plan, const workflow::AblationConfig& cfg,
                            const std::filesystem::path& run_dir,
                            const std::optional<workflow::OraclePredicate>& oracle = yplus_oracle(),
                            const std::string& text = kPitzYplus) {
    const auto script = scenario::build_scenario({text, oracle, plan, "test"}, {});
    return run_scripted(script, {"req", text, oracle}, cfg, run_dir);
}

inline void expect_error(ErrorCode code, const std::function<void()>& fn, bool* matched) {
    try {
        fn();
        *matched = false;
    } catch (const Error& e) {
        *matched = e.code() == code;
    }
}

}  // namespace cotflow::testing

#define CHECK_ERROR_CODE(code, expr)                                            \
    do {                                                                        \
        bool cotflow_matched_ = false;                                          \
        ::cotflow::testing::expect_error(code, [&] { (void)(expr); }, &cotflow_matched_); \
        CHECK_MESSAGE(cotflow_matched_, "expected " #code " from " #expr);      \
    } while (0)
