// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/llm/backend.hpp"

#include <map>
#include <mutex>
#include <set>
#include <vector>

namespace cotflow::llm {

/// Deterministic backend that answers from a canned table keyed by
/// (role, subtask kind, attempt index). Prompt text is ignored apart from the
/// non-empty precondition, so template wording never changes a test outcome.
class ScriptedBackend final : public LlmBackend {
public:
    explicit ScriptedBackend(std::map<CallKey, Completion> responses);

    Completion complete(const CompletionRequest& request) override;

    /// Keys that were never requested, in key order.
    std::vector<CallKey> unconsumed() const;

    /// Prompts seen so far, in call order.
    std::vector<std::string> prompts() const;

private:
    std::map<CallKey, Completion> responses_;
    mutable std::mutex mutex_;
    std::set<CallKey> consumed_;
    std::vector<std::string> prompts_;
};

}  // namespace cotflow::llm
