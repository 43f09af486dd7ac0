// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/agents/agents.hpp"
#include "cotflow/agents/templates.hpp"
#include "cotflow/llm/backend.hpp"
#include "cotflow/retrieval/embedding.hpp"
#include "cotflow/retrieval/index.hpp"
#include "cotflow/sandbox/executor.hpp"
#include "cotflow/workflow/trace.hpp"
#include "cotflow/workflow/trace_log.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cotflow::workflow {

struct Decomposition {
    std::vector<agents::PlannedTask> tasks;
    /// The Architect's plan had a Postprocessing task (even if ablated away).
    bool postprocessing_requested = false;
};

/// Stage one. The Architect is always consulted; at qdcot level 0 the plan
/// collapses to a single Simulation task carrying the whole requirement.
Decomposition decompose_requirement(agents::AgentSession& session, const Requirement& req,
                                    std::string_view context, const AblationConfig& cfg);

/// Stage two: fixed mapping from a task to its subtasks.
std::vector<Subtask> decompose_task(const agents::PlannedTask& task, const AblationConfig& cfg);

/// Reviewers are added stage by stage as icot_level goes from 1 to 3.
bool has_reviewer(SubtaskKind kind, const AblationConfig& cfg);

/// File-role class of a file name, or nothing for an unknown name.
std::optional<SubtaskKind> file_role(std::string_view file);

/// Index of the earliest subtask whose role class matches one of `files`.
/// Throws Error(UnmappableFiles) when `files` is empty or nothing matches.
std::size_t map_files_to_subtask(const std::vector<std::string>& files, const std::vector<Subtask>& subtasks);

/// Per-run state shared by the ICOT loops of one workflow.
struct IcotContext {
    agents::AgentSession& session;
    sandbox::Executor& executor;
    std::string requirement;
    std::string context;
    /// Review cycles charged per kind; the budget holds across verification rounds.
    std::map<SubtaskKind, int> iterations_used;
    /// Executions per kind, used as the executor attempt index.
    std::map<SubtaskKind, int> executions;
    std::map<SubtaskKind, agents::FileSet> files;
    TraceLogWriter* log = nullptr;
};

/// Write, run, then review, rewrite and rerun while the run fails, a
/// reviewer exists for the stage and budget remains. `initial_feedback`
/// turns the first write into a rewrite.
SubtaskOutcome run_icot(Subtask& sub, const AblationConfig& cfg, IcotContext& ctx,
                        const std::optional<agents::ReviewFeedback>& initial_feedback = std::nullopt,
                        std::string_view initial_error = {});

struct WorkflowDeps {
    llm::LlmBackend* backend = nullptr;
    sandbox::Executor* executor = nullptr;
    const agents::TemplateStore* templates = nullptr;
    /// Retrieval is skipped when either is null.
    const retrieval::FlatIndex* index = nullptr;
    const retrieval::Embedder* embedder = nullptr;
    llm::LlmParams params;
    std::size_t top_k = 1;
    std::size_t context_budget = 12'000;
    /// Receives trace.jsonl and the working directory "work/".
    std::filesystem::path run_dir;
    Clock clock;
    /// Consulted for the last rung when the requirement has no oracle.
    std::function<bool(const WorkflowTrace&)> human_confirm;
};

/// Runs one requirement end to end. Errors raised by agents or the executor
/// end the run early; they are recorded in `abort` and the trace (persisted
/// to the run log) is still returned.
WorkflowTrace run_workflow(const Requirement& req, const AblationConfig& cfg, const WorkflowDeps& deps,
                           const std::string& run_id);

}  // namespace cotflow::workflow
