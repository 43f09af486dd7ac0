// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/retrieval/corpus.hpp"

#include "cotflow/common.hpp"
#include "cotflow/util.hpp"

#include <nlohmann/json.hpp>

namespace cotflow::retrieval {

std::vector<CorpusEntry> load_manifest(const std::filesystem::path& manifest_path) {
    const auto doc =
        nlohmann::json::parse(read_text_file(manifest_path), nullptr, /*allow_exceptions=*/false);
    const std::string where = manifest_path.string();
    if (doc.is_discarded() || doc.value("format", std::string()) != "cotflow-corpus") {
        throw Error(ErrorCode::SchemaError, where + ": not a cotflow corpus manifest");
    }
    if (doc.value("version", 0) != 1) throw Error(ErrorCode::SchemaError, where + ": unsupported version");
    const auto root = std::filesystem::absolute(manifest_path).parent_path();

    std::vector<CorpusEntry> entries;
    const auto& cases = doc.at("cases");
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        const std::string at = where + ": cases[" + std::to_string(i) + "]";
        if (!c.contains("id") || !c.contains("path") || !c.contains("files")) {
            throw Error(ErrorCode::SchemaError, at + " needs id, path and files");
        }
        CorpusEntry entry{c["id"].get<std::string>(), root / c["path"].get<std::string>(),
                          c["files"].get<std::vector<std::string>>()};
        if (entry.files.empty()) throw Error(ErrorCode::SchemaError, at + " lists no files");
        entries.push_back(std::move(entry));
    }
    return entries;
}

CaseSource read_case(const CorpusEntry& entry) {
    std::string text = "// case: " + entry.id + "\n";
    for (const auto& file : entry.files) {
        text += "// file: " + file + "\n";
        text += read_text_file(entry.path / file);
        if (!text.empty() && text.back() != '\n') text += '\n';
    }
    return CaseSource{entry.id, entry.path, std::move(text)};
}

std::vector<CaseSource> read_corpus(const std::vector<CorpusEntry>& entries) {
    std::vector<CaseSource> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(read_case(e));
    return out;
}

std::string context_header(const CaseDocument& doc) {
    return "### Reference case: " + doc.id + "\n";
}

std::string stack_context(const std::vector<RetrievalHit>& hits, std::string_view user_message,
                          std::size_t char_budget) {
    std::string out;
    std::size_t remaining = char_budget;
    for (const auto& hit : hits) {
        const std::string header = context_header(*hit.doc);
        if (remaining <= header.size()) break;
        remaining -= header.size();
        out += header;
        const std::string& body = hit.doc->text;
        const std::size_t take = std::min(body.size(), remaining);
        out.append(body, 0, take);
        remaining -= take;
        if (!out.empty() && out.back() != '\n') out += '\n';
    }
    out.append(user_message);
    return out;
}

}  // namespace cotflow::retrieval
