// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Structured agent replies and their text formats. Every parser accepts the
// JSON object anywhere inside the completion (prose and code fences around it
// are ignored) and throws the role's parse error when none qualifies.

#include "cotflow/common.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::agents {

/// First balanced JSON object in `text` for which `accept` holds.
std::optional<nlohmann::json> find_json_object(
    std::string_view text, const std::function<bool(const nlohmann::json&)>& accept);

// --- Architect -----------------------------------------------------------

struct PlannedTask {
    TaskKind kind = TaskKind::Simulation;
    std::string description;

    bool operator==(const PlannedTask&) const = default;
};

/// {"tasks": [{"kind": "Simulation"|"Postprocessing", "description": "..."}]}
/// Exactly one Simulation task, at most one Postprocessing task; returned in
/// that order. Throws Error(ArchitectParseError).
std::vector<PlannedTask> parse_plan(std::string_view text);
std::string render_plan(const std::vector<PlannedTask>& tasks);

// --- InputWriter ---------------------------------------------------------

struct FileEntry {
    std::string path;
    std::string content;

    bool operator==(const FileEntry&) const = default;
};

struct FileSet {
    std::vector<FileEntry> entries;

    bool empty() const { return entries.empty(); }
    const FileEntry* find(std::string_view path) const;
    /// Entries of `update` replace same-path entries; new paths are appended.
    void merge(const FileSet& update);
    /// Plain-text listing used inside prompts.
    std::string render() const;

    bool operator==(const FileSet&) const = default;
};

/// {"files": [{"path": "...", "content": "..."}]}. An object whose file list
/// is empty raises Error(EmptyGeneration); no object at all raises
/// Error(SchemaError).
FileSet parse_fileset(std::string_view text);
std::string render_fileset(const FileSet& files);

/// Writes every entry under `workdir` (Error(PathEscape) on bad paths).
std::vector<std::filesystem::path> write_fileset(const FileSet& files,
                                                 const std::filesystem::path& workdir);

// --- Reviewer ------------------------------------------------------------

struct ReviewFeedback {
    std::string diagnosis;
    std::vector<std::string> suggested_files;

    bool operator==(const ReviewFeedback&) const = default;
};

/// {"diagnosis": "...", "files": ["..."]}; the diagnosis must be non-empty.
/// Throws Error(ReviewerParseError).
ReviewFeedback parse_review(std::string_view text);
std::string render_review(const ReviewFeedback& feedback);

// --- Verifier ------------------------------------------------------------

enum class VerdictStatus { Success, Failure };

struct Verdict {
    VerdictStatus status = VerdictStatus::Success;
    std::string problem_description;
    std::vector<std::string> files_to_modify;

    bool operator==(const Verdict&) const = default;
};

/// Reads {"status", "Problem_description", "files_to_modify"}. A failure must
/// carry a description or files. Throws Error(VerifierParseError) when no
/// object with a valid "status" key is present.
Verdict parse_verdict(std::string_view text);

/// Canonical rendering with the exact key spellings above.
std::string render_verdict(const Verdict& verdict);

}  // namespace cotflow::agents
