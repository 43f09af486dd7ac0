// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/agents/templates.hpp"
#include "cotflow/agents/wire.hpp"
#include "cotflow/llm/backend.hpp"
#include "cotflow/llm/ledger.hpp"
#include "cotflow/sandbox/run_record.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cotflow::agents {

/// One completion consumed by an agent, as reported to observers.
struct AgentCall {
    llm::CallKey key;
    Phase phase = Phase::NonIteration;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    bool parsed = false;  // false for a reply that triggered a reprompt or failed
};

/// A produced file as shown to the Verifier.
struct ArtifactInfo {
    std::string path;  // relative to the working directory
    std::uintmax_t bytes = 0;
    std::optional<std::size_t> data_rows;                        // delimited data files
    std::optional<std::pair<std::uint32_t, std::uint32_t>> image_size;  // PNG width x height
};

/// Files under `workdir` that look like results (images, data, logs of
/// post-processing), excluding `inputs`. Sorted by path.
std::vector<ArtifactInfo> scan_artifacts(const std::filesystem::path& workdir,
                                         const std::vector<std::string>& inputs);

/// Textual stand-in for the artifacts handed to the Verifier: script output
/// verbatim, then one line per artifact.
std::string describe_artifacts(const std::vector<ArtifactInfo>& artifacts, std::string_view script_output);

/// Agent roles bound to one run: a backend, a template store, the run's
/// ledger and working directory. Every call consumes one completion and
/// appends one ledger entry; a reply that cannot be parsed is answered with
/// one reprompt quoting it, and a second failure is raised.
class AgentSession {
public:
    AgentSession(llm::LlmBackend& backend, const TemplateStore& templates, llm::LlmParams params,
                 llm::TokenLedger& ledger, std::filesystem::path workdir);

    void set_observer(std::function<void(const AgentCall&)> observer) { observer_ = std::move(observer); }

    /// Stage-one decomposition of a requirement (non-iteration phase).
    std::vector<PlannedTask> architect_plan(std::string_view requirement, std::string_view retrieved_context);

    /// First write when `feedback` is empty (non-iteration phase), otherwise
    /// a rewrite (iteration phase) that sees `previous`, the feedback and the
    /// error text. The reply is written into the working directory.
    FileSet write_inputs(SubtaskKind kind, std::string_view subtask_description,
                         std::string_view requirement, std::string_view context,
                         const std::optional<ReviewFeedback>& feedback, const FileSet& previous,
                         std::string_view error_text = {});

    /// Iteration phase.
    ReviewFeedback review_error(SubtaskKind kind, std::string_view subtask_description,
                                const sandbox::RunRecord& run, const FileSet& files);

    /// Non-iteration phase.
    Verdict verify_results(std::string_view requirement, std::string_view artifact_summary);

    const std::filesystem::path& workdir() const { return workdir_; }
    const llm::TokenLedger& ledger() const { return ledger_; }

private:
    template <typename T>
    T call(AgentRole role, std::optional<SubtaskKind> kind, Phase phase, const std::string& prompt,
           ErrorCode failure_code, const std::function<T(std::string_view)>& parse);

    int next_attempt(AgentRole role, std::optional<SubtaskKind> kind);

    llm::LlmBackend& backend_;
    const TemplateStore& templates_;
    llm::LlmParams params_;
    llm::TokenLedger& ledger_;
    std::filesystem::path workdir_;
    std::map<std::pair<AgentRole, std::optional<SubtaskKind>>, int> attempts_;
    std::function<void(const AgentCall&)> observer_;
};

/// Lines of a delimited data file that hold only numbers and separators.
std::size_t count_data_rows(const std::filesystem::path& path);

/// Error excerpt handed to the Reviewer; never empty.
std::string error_excerpt(const sandbox::RunRecord& run, std::size_t max_chars = 4000);

}  // namespace cotflow::agents
