// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/agents/wire.hpp"

#include "cotflow/sandbox/run_record.hpp"

namespace cotflow::agents {

using nlohmann::json;

namespace {

// End of the balanced object starting at `open`, honouring JSON strings.
std::optional<std::size_t> matching_brace(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::nullopt;
}

std::vector<std::string> string_array(const json& obj, const char* key) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) return out;
    for (const auto& v : *it) {
        if (v.is_string()) out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

std::optional<json> find_json_object(std::string_view text,
                                     const std::function<bool(const json&)>& accept) {
    for (std::size_t pos = text.find('{'); pos != std::string_view::npos; pos = text.find('{', pos + 1)) {
        const auto close = matching_brace(text, pos);
        if (!close) continue;
        json candidate = json::parse(text.substr(pos, *close - pos + 1), nullptr, /*allow_exceptions=*/false);
        if (!candidate.is_discarded() && candidate.is_object() && accept(candidate)) return candidate;
    }
    return std::nullopt;
}

std::vector<PlannedTask> parse_plan(std::string_view text) {
    auto obj = find_json_object(text, [](const json& j) {
        return j.contains("tasks") && j["tasks"].is_array();
    });
    if (!obj) throw Error(ErrorCode::ArchitectParseError, "no object with a \"tasks\" array");

    std::optional<PlannedTask> simulation;
    std::optional<PlannedTask> postprocessing;
    for (const auto& t : (*obj)["tasks"]) {
        if (!t.is_object() || !t.contains("kind") || !t["kind"].is_string()) {
            throw Error(ErrorCode::ArchitectParseError, "task without a kind");
        }
        auto kind = parse_task_kind(t["kind"].get<std::string>());
        if (!kind) throw Error(ErrorCode::ArchitectParseError, "unknown task kind " + t["kind"].dump());
        PlannedTask task{*kind, t.value("description", std::string())};
        if (task.description.empty()) throw Error(ErrorCode::ArchitectParseError, "task without a description");
        auto& slot = *kind == TaskKind::Simulation ? simulation : postprocessing;
        if (slot) throw Error(ErrorCode::ArchitectParseError, "repeated task kind");
        slot = std::move(task);
    }
    if (!simulation) throw Error(ErrorCode::ArchitectParseError, "plan has no Simulation task");
    std::vector<PlannedTask> out{*simulation};
    if (postprocessing) out.push_back(*postprocessing);
    return out;
}

std::string render_plan(const std::vector<PlannedTask>& tasks) {
    json arr = json::array();
    for (const auto& t : tasks) arr.push_back({{"kind", to_string(t.kind)}, {"description", t.description}});
    return json{{"tasks", arr}}.dump(2);
}

const FileEntry* FileSet::find(std::string_view path) const {
    for (const auto& e : entries) {
        if (e.path == path) return &e;
    }
    return nullptr;
}

void FileSet::merge(const FileSet& update) {
    for (const auto& e : update.entries) {
        bool replaced = false;
        for (auto& mine : entries) {
            if (mine.path == e.path) {
                mine.content = e.content;
                replaced = true;
                break;
            }
        }
        if (!replaced) entries.push_back(e);
    }
}

std::string FileSet::render() const {
    std::string out;
    for (const auto& e : entries) {
        out += "=== " + e.path + " ===\n";
        out += e.content;
        if (!e.content.empty() && e.content.back() != '\n') out += '\n';
    }
    return out;
}

FileSet parse_fileset(std::string_view text) {
    auto obj = find_json_object(text, [](const json& j) {
        return j.contains("files") && j["files"].is_array();
    });
    if (!obj) throw Error(ErrorCode::SchemaError, "no object with a \"files\" array");
    FileSet out;
    for (const auto& f : (*obj)["files"]) {
        if (!f.is_object() || !f.contains("path") || !f["path"].is_string() || !f.contains("content") ||
            !f["content"].is_string()) {
            throw Error(ErrorCode::SchemaError, "file entry needs string path and content");
        }
        out.merge(FileSet{{FileEntry{f["path"].get<std::string>(), f["content"].get<std::string>()}}});
    }
    if (out.empty()) throw Error(ErrorCode::EmptyGeneration, "reply lists no files");
    return out;
}

std::string render_fileset(const FileSet& files) {
    json arr = json::array();
    for (const auto& e : files.entries) arr.push_back({{"path", e.path}, {"content", e.content}});
    return json{{"files", arr}}.dump(2);
}

std::vector<std::filesystem::path> write_fileset(const FileSet& files, const std::filesystem::path& workdir) {
    // Validate everything first so a bad entry leaves the directory untouched.
    for (const auto& e : files.entries) sandbox::resolve_inside(workdir, e.path);
    std::vector<std::filesystem::path> written;
    for (const auto& e : files.entries) written.push_back(sandbox::write_inside(workdir, e.path, e.content));
    return written;
}

ReviewFeedback parse_review(std::string_view text) {
    auto obj = find_json_object(text, [](const json& j) {
        return j.contains("diagnosis") && j["diagnosis"].is_string() &&
               !j["diagnosis"].get<std::string>().empty();
    });
    if (!obj) throw Error(ErrorCode::ReviewerParseError, "no object with a non-empty \"diagnosis\"");
    return ReviewFeedback{(*obj)["diagnosis"].get<std::string>(), string_array(*obj, "files")};
}

std::string render_review(const ReviewFeedback& feedback) {
    return json{{"diagnosis", feedback.diagnosis}, {"files", feedback.suggested_files}}.dump(2);
}

Verdict parse_verdict(std::string_view text) {
    auto obj = find_json_object(text, [](const json& j) {
        if (!j.contains("status") || !j["status"].is_string()) return false;
        const auto s = j["status"].get<std::string>();
        return s == "success" || s == "failure";
    });
    if (!obj) throw Error(ErrorCode::VerifierParseError, "no object with a valid \"status\" key");
    Verdict v;
    v.status = (*obj)["status"].get<std::string>() == "success" ? VerdictStatus::Success : VerdictStatus::Failure;
    for (const char* key : {"Problem_description", "problem_description"}) {
        if (auto it = obj->find(key); it != obj->end() && it->is_string()) {
            v.problem_description = it->get<std::string>();
            break;
        }
    }
    v.files_to_modify = string_array(*obj, "files_to_modify");
    if (v.status == VerdictStatus::Failure && v.problem_description.empty() && v.files_to_modify.empty()) {
        throw Error(ErrorCode::VerifierParseError, "failure verdict without description or files");
    }
    return v;
}

std::string render_verdict(const Verdict& verdict) {
    json obj;
    obj["status"] = verdict.status == VerdictStatus::Success ? "success" : "failure";
    obj["Problem_description"] = verdict.problem_description;
    obj["files_to_modify"] = verdict.files_to_modify;
    return obj.dump(4);
}

}  // namespace cotflow::agents
