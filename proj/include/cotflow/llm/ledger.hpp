// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/common.hpp"
#include "cotflow/llm/backend.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cotflow::llm {

struct LedgerEntry {
    AgentRole role = AgentRole::Architect;
    std::optional<SubtaskKind> subtask;
    Phase phase = Phase::NonIteration;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct TokenTotals {
    std::int64_t prompt = 0;
    std::int64_t completion = 0;

    std::int64_t total() const { return prompt + completion; }
    TokenTotals& operator+=(const TokenTotals& other) {
        prompt += other.prompt;
        completion += other.completion;
        return *this;
    }
    bool operator==(const TokenTotals&) const = default;
};

/// Append-only record of every completion consumed by one run.
class TokenLedger {
public:
    void append(const LedgerEntry& entry) { entries_.push_back(entry); }

    const std::vector<LedgerEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    TokenTotals totals() const;
    TokenTotals totals(Phase phase) const;

private:
    std::vector<LedgerEntry> entries_;
};

/// Appends exactly one entry built from `completion`.
void record(TokenLedger& ledger, AgentRole role, std::optional<SubtaskKind> subtask, Phase phase,
            const Completion& completion);

}  // namespace cotflow::llm
