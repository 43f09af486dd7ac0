// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/common.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cotflow::agents {

using TemplateValues = std::map<std::string, std::string, std::less<>>;

/// Replaces every {{name}} with values[name]. Unknown or unterminated
/// placeholders raise Error(TemplateError).
std::string render_template(std::string_view text, const TemplateValues& values);

/// Prompt templates keyed by file stem, e.g. "architect",
/// "input_writer.SimulationRun", "input_writer.rewrite", "reprompt".
class TemplateStore {
public:
    /// Loads every *.txt in `dir`; `dir/store.json` carries
    /// {"format": "cotflow-templates", "version": N}.
    static TemplateStore load(const std::filesystem::path& dir);

    TemplateStore(std::map<std::string, std::string, std::less<>> templates, int version);

    int version() const { return version_; }
    bool contains(std::string_view name) const;

    /// Throws Error(TemplateError) when absent.
    const std::string& get(std::string_view name) const;

    /// "<role>.<kind>[.<variant>]" falling back to "<role>[.<variant>]".
    const std::string& for_role(AgentRole role, std::optional<SubtaskKind> kind,
                                std::string_view variant = {}) const;

private:
    std::map<std::string, std::string, std::less<>> templates_;
    int version_;
};

/// Template stem prefix for a role: architect, input_writer, reviewer, verifier.
std::string_view role_stem(AgentRole role);

}  // namespace cotflow::agents
