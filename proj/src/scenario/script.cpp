// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/scenario/script.hpp"

#include "cotflow/util.hpp"

#include <nlohmann/json.hpp>

namespace cotflow::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::SchemaError, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) schema_error(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::int64_t require_count(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        schema_error(where + "." + key, "expected a nonnegative integer");
    }
    return v.get<std::int64_t>();
}

std::optional<SubtaskKind> parse_subtask_field(const json& obj, const std::string& where) {
    const std::string text = require_string(obj, "subtask", where);
    if (text == kNoSubtask) return std::nullopt;
    auto kind = parse_subtask_kind(text);
    if (!kind) schema_error(where + ".subtask", "unknown subtask kind '" + text + "'");
    return kind;
}

}  // namespace

ScenarioScript parse_scenario(const std::string& text) {
    const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) schema_error("scenario", "not a JSON object");
    if (doc.value("format", std::string()) != "cotflow-scenario") {
        schema_error("scenario.format", "expected \"cotflow-scenario\"");
    }
    if (doc.value("version", 0) != kScenarioFormatVersion) {
        schema_error("scenario.version", "unsupported version");
    }

    ScenarioScript out;
    out.description = doc.value("description", std::string());

    const json& responses = require(doc, "responses", "scenario");
    if (!responses.is_array()) schema_error("scenario.responses", "expected an array");
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const std::string where = "scenario.responses[" + std::to_string(i) + "]";
        const json& r = responses[i];
        if (!r.is_object()) schema_error(where, "expected an object");
        const std::string role_text = require_string(r, "role", where);
        auto role = parse_agent_role(role_text);
        if (!role) schema_error(where + ".role", "unknown role '" + role_text + "'");
        llm::CallKey key{*role, parse_subtask_field(r, where),
                         static_cast<int>(require_count(r, "attempt", where))};
        llm::Completion completion{require_string(r, "text", where),
                                   require_count(r, "prompt_tokens", where),
                                   require_count(r, "completion_tokens", where)};
        if (!out.responses.emplace(key, std::move(completion)).second) {
            schema_error(where, "duplicate key " + key.describe());
        }
    }

    const json& executor = require(doc, "executor", "scenario");
    if (!executor.is_array()) schema_error("scenario.executor", "expected an array");
    for (std::size_t i = 0; i < executor.size(); ++i) {
        const std::string where = "scenario.executor[" + std::to_string(i) + "]";
        const json& e = executor[i];
        if (!e.is_object()) schema_error(where, "expected an object");
        auto kind = parse_subtask_field(e, where);
        if (!kind) schema_error(where + ".subtask", "executor entries need a subtask kind");
        const int attempt = static_cast<int>(require_count(e, "attempt", where));
        const std::string tag_text = require_string(e, "outcome", where);
        auto tag = parse_outcome_tag(tag_text);
        if (!tag) schema_error(where + ".outcome", "unknown outcome '" + tag_text + "'");
        if (!tag_matches_kind(*tag, *kind)) {
            schema_error(where + ".outcome", tag_text + " is not valid for " +
                                                 std::string(to_string(*kind)));
        }
        ScriptedOutcome outcome;
        outcome.tag = *tag;
        outcome.stdout_text = e.value("stdout", std::string());
        outcome.stderr_text = e.value("stderr", std::string());
        outcome.duration_s = e.value("duration_s", 0.0);
        if (auto files = e.find("files"); files != e.end()) {
            if (!files->is_object()) schema_error(where + ".files", "expected an object");
            for (const auto& [path, content] : files->items()) {
                if (!content.is_string()) schema_error(where + ".files." + path, "expected a string");
                outcome.files.emplace(path, content.get<std::string>());
            }
        }
        if (!out.executor_outcomes.emplace(ExecutorKey{*kind, attempt}, std::move(outcome)).second) {
            schema_error(where, "duplicate executor key");
        }
    }
    return out;
}

ScenarioScript load_scenario(const std::filesystem::path& path) {
    try {
        return parse_scenario(read_text_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaError) {
            throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
        }
        throw;
    }
}

std::string dump_scenario(const ScenarioScript& script) {
    json responses = json::array();
    for (const auto& [key, completion] : script.responses) {
        responses.push_back({
            {"role", to_string(key.role)},
            {"subtask", key.subtask ? to_string(*key.subtask) : kNoSubtask},
            {"attempt", key.attempt},
            {"text", completion.text},
            {"prompt_tokens", completion.prompt_tokens},
            {"completion_tokens", completion.completion_tokens},
        });
    }
    json executor = json::array();
    for (const auto& [key, outcome] : script.executor_outcomes) {
        json entry = {
            {"subtask", to_string(key.first)},
            {"attempt", key.second},
            {"outcome", to_string(outcome.tag)},
            {"stdout", outcome.stdout_text},
            {"stderr", outcome.stderr_text},
            {"duration_s", outcome.duration_s},
        };
        if (!outcome.files.empty()) entry["files"] = outcome.files;
        executor.push_back(std::move(entry));
    }
    json doc = {
        {"format", "cotflow-scenario"},
        {"version", kScenarioFormatVersion},
        {"description", script.description},
        {"responses", std::move(responses)},
        {"executor", std::move(executor)},
    };
    return doc.dump(2) + "\n";
}

void save_scenario(const ScenarioScript& script, const std::filesystem::path& path) {
    write_text_file(path, dump_scenario(script));
}

llm::TokenTotals declared_totals(const ScenarioScript& script) {
    llm::TokenTotals sum;
    for (const auto& [_, c] : script.responses) sum += llm::TokenTotals{c.prompt_tokens, c.completion_tokens};
    return sum;
}

}  // namespace cotflow::scenario
