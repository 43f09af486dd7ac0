// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/retrieval/index.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow::retrieval {

/// One tutorial case listed in a corpus manifest.
struct CorpusEntry {
    std::string id;
    /// Case directory, absolute after loading.
    std::filesystem::path path;
    /// Files (relative to `path`) concatenated into the case document.
    std::vector<std::string> files;
};

/// Reads a manifest of the form
///   {"format": "cotflow-corpus", "version": 1,
///    "cases": [{"id": ..., "path": ..., "files": [...]}]}
/// Case paths are resolved against the manifest's directory.
std::vector<CorpusEntry> load_manifest(const std::filesystem::path& manifest_path);

/// One document per case: a "// case: <id>" line, then each listed file under a "// file: <name>" line.
CaseSource read_case(const CorpusEntry& entry);

std::vector<CaseSource> read_corpus(const std::vector<CorpusEntry>& entries);

/// Retrieved documents in rank order, each under a one-line header naming its
/// case, then the user message. `char_budget` limits the document part;
/// later documents are cut first and the user message is never cut.
std::string stack_context(const std::vector<RetrievalHit>& hits, std::string_view user_message,
                          std::size_t char_budget = 12'000);

std::string context_header(const CaseDocument& doc);

}  // namespace cotflow::retrieval
