// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cotflow::sandbox {

struct RunRecord {
    std::string command;
    int exit_code = 0;
    std::string stdout_text;  // capped
    std::string stderr_text;  // capped
    double duration_s = 0.0;
    /// Set by every Executor; raw process execution leaves it empty unless
    /// the run timed out.
    std::optional<OutcomeTag> outcome_tag;
    bool timed_out = false;
    std::string note;
};

/// Resolves `relative` under `workdir`, rejecting absolute paths, empty
/// paths and any path that would leave the directory (Error(PathEscape)).
std::filesystem::path resolve_inside(const std::filesystem::path& workdir, std::string_view relative);

/// Writes `content` to `relative` under `workdir` after resolve_inside().
std::filesystem::path write_inside(const std::filesystem::path& workdir, std::string_view relative,
                                   std::string_view content);

}  // namespace cotflow::sandbox
