// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Run-trace log: one JSON object per line. Every record carries
//   "v"        format version (kTraceLogVersion)
//   "run"      run id
//   "event"    decomposition | plan | write | attempt | review | verdict |
//              resume | abort | summary
//   "subtask"  subtask kind, or "-" for calls not tied to one
//   "attempt"  attempt index of that call or execution
//   "phase"    non_iteration | iteration (LLM events only)
//   "prompt_tokens", "completion_tokens"
//   "wall_ms"  milliseconds since the run started (0 under a null clock)
// plus event-specific fields. The final record of a run is its summary.

#include "cotflow/workflow/trace.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace cotflow::workflow {

inline constexpr int kTraceLogVersion = 1;

/// Milliseconds since some fixed origin; an empty function means "always 0".
using Clock = std::function<double()>;

Clock steady_clock();

class TraceLogWriter {
public:
    /// Truncates `path`, creating parent directories.
    TraceLogWriter(const std::filesystem::path& path, std::string run_id, Clock clock);

    /// Adds the common fields to `fields` and appends one line.
    void event(std::string_view kind, std::optional<SubtaskKind> subtask, int attempt,
               nlohmann::json fields = nlohmann::json::object());

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::string run_id_;
    Clock clock_;
    double origin_ = 0.0;
};

/// Summary record fields of a finished trace.
nlohmann::json summarize(const WorkflowTrace& trace);

/// Parses every line; throws Error(SchemaError) with the line number on a
/// malformed record or a version mismatch.
std::vector<nlohmann::json> read_trace_log(const std::filesystem::path& path);

}  // namespace cotflow::workflow
