// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/agents/templates.hpp"

#include "cotflow/util.hpp"

#include <nlohmann/json.hpp>

namespace cotflow::agents {

std::string render_template(std::string_view text, const TemplateValues& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        out.append(text.substr(pos, open - pos));
        const auto close = text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            throw Error(ErrorCode::TemplateError, "unterminated placeholder");
        }
        const auto name = trim(text.substr(open + 2, close - open - 2));
        auto it = values.find(name);
        if (it == values.end()) {
            throw Error(ErrorCode::TemplateError, "no value for placeholder '" + std::string(name) + "'");
        }
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

TemplateStore::TemplateStore(std::map<std::string, std::string, std::less<>> templates, int version)
    : templates_(std::move(templates)), version_(version) {}

TemplateStore TemplateStore::load(const std::filesystem::path& dir) {
    const auto meta = nlohmann::json::parse(read_text_file(dir / "store.json"), nullptr, false);
    if (meta.is_discarded() || meta.value("format", std::string()) != "cotflow-templates") {
        throw Error(ErrorCode::TemplateError, (dir / "store.json").string() + ": not a template store");
    }
    std::map<std::string, std::string, std::less<>> templates;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        templates.emplace(entry.path().stem().string(), read_text_file(entry.path()));
    }
    return TemplateStore(std::move(templates), meta.value("version", 0));
}

bool TemplateStore::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

const std::string& TemplateStore::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw Error(ErrorCode::TemplateError, "missing template '" + std::string(name) + "'");
    return it->second;
}

const std::string& TemplateStore::for_role(AgentRole role, std::optional<SubtaskKind> kind,
                                           std::string_view variant) const {
    std::string base(role_stem(role));
    std::string suffix = variant.empty() ? std::string() : "." + std::string(variant);
    if (kind) {
        const std::string specific = base + "." + std::string(to_string(*kind)) + suffix;
        if (contains(specific)) return get(specific);
    }
    return get(base + suffix);
}

std::string_view role_stem(AgentRole role) {
    switch (role) {
        case AgentRole::Architect: return "architect";
        case AgentRole::InputWriter: return "input_writer";
        case AgentRole::Reviewer: return "reviewer";
        case AgentRole::Verifier: return "verifier";
    }
    return "?";
}

}  // namespace cotflow::agents
