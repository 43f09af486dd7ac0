// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/common.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace cotflow::llm {

struct LlmParams {
    std::string model_name = "gpt-4o";
    double temperature = 0.01;
    int max_output_tokens = 4096;

    /// Throws Error(ConfigError) when a field is out of range.
    void validate() const;
};

struct Completion {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    bool operator==(const Completion&) const = default;
};

/// Identifies one agent call within a run. `attempt` counts earlier calls
/// with the same (role, subtask) pair in the same run, starting at 0.
struct CallKey {
    AgentRole role = AgentRole::Architect;
    std::optional<SubtaskKind> subtask;
    int attempt = 0;

    auto operator<=>(const CallKey&) const = default;
    bool operator==(const CallKey&) const = default;

    std::string describe() const;
};

struct CompletionRequest {
    std::string prompt;
    LlmParams params;
    CallKey key;
};

/// Chat-completion boundary. Implementations must be safe for concurrent
/// calls.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;

    /// Returns the completion text with service-reported token counts.
    virtual Completion complete(const CompletionRequest& request) = 0;
};

}  // namespace cotflow::llm
