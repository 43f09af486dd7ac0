// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/llm/backend.hpp"
#include "cotflow/llm/ledger.hpp"
#include "cotflow/llm/scripted.hpp"

namespace cotflow::llm {

void LlmParams::validate() const {
    if (model_name.empty()) throw Error(ErrorCode::ConfigError, "model name is empty");
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw Error(ErrorCode::ConfigError, "temperature must lie in [0, 2]");
    }
    if (max_output_tokens <= 0) {
        throw Error(ErrorCode::ConfigError, "max_output_tokens must be positive");
    }
}

std::string CallKey::describe() const {
    std::string out(to_string(role));
    out += '/';
    out += subtask ? std::string(to_string(*subtask)) : std::string(kNoSubtask);
    out += '/';
    out += std::to_string(attempt);
    return out;
}

TokenTotals TokenLedger::totals() const {
    TokenTotals sum;
    for (const auto& e : entries_) sum += TokenTotals{e.prompt_tokens, e.completion_tokens};
    return sum;
}

TokenTotals TokenLedger::totals(Phase phase) const {
    TokenTotals sum;
    for (const auto& e : entries_) {
        if (e.phase == phase) sum += TokenTotals{e.prompt_tokens, e.completion_tokens};
    }
    return sum;
}

void record(TokenLedger& ledger, AgentRole role, std::optional<SubtaskKind> subtask, Phase phase,
            const Completion& completion) {
    ledger.append(LedgerEntry{role, subtask, phase, completion.prompt_tokens,
                              completion.completion_tokens});
}

ScriptedBackend::ScriptedBackend(std::map<CallKey, Completion> responses)
    : responses_(std::move(responses)) {}

Completion ScriptedBackend::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw Error(ErrorCode::DomainError, "prompt is empty");
    std::lock_guard lock(mutex_);
    auto it = responses_.find(request.key);
    if (it == responses_.end()) {
        throw Error(ErrorCode::MissingScenarioEntry,
                    "no scripted response for " + request.key.describe());
    }
    consumed_.insert(request.key);
    prompts_.push_back(request.prompt);
    return it->second;
}

std::vector<CallKey> ScriptedBackend::unconsumed() const {
    std::lock_guard lock(mutex_);
    std::vector<CallKey> out;
    for (const auto& [key, _] : responses_) {
        if (!consumed_.contains(key)) out.push_back(key);
    }
    return out;
}

std::vector<std::string> ScriptedBackend::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

}  // namespace cotflow::llm
