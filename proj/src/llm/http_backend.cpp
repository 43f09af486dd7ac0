// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/llm/http_backend.hpp"

#include <nlohmann/json.hpp>

namespace cotflow::llm {

using nlohmann::json;

HttpChatBackend::HttpChatBackend(HttpEndpoint endpoint, RetryPolicy policy, std::string path)
    : endpoint_(std::move(endpoint)), policy_(std::move(policy)), path_(std::move(path)) {}

Completion HttpChatBackend::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw Error(ErrorCode::DomainError, "prompt is empty");
    const std::string body = post_json(endpoint_, path_, build_chat_request(request), policy_,
                                       &attempts_);
    return parse_chat_response(body);
}

std::string build_chat_request(const CompletionRequest& request) {
    json body = {
        {"model", request.params.model_name},
        {"temperature", request.params.temperature},
        {"max_tokens", request.params.max_output_tokens},
        {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
    };
    return body.dump();
}

Completion parse_chat_response(std::string_view body) {
    const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::BackendRefusal, "completion body is not JSON: " + std::string(body));
    }
    const auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) {
        throw Error(ErrorCode::BackendRefusal, "completion has no choices: " + std::string(body));
    }
    const json& message = (*choices)[0].value("message", json::object());
    const auto content = message.find("content");
    if (content == message.end() || !content->is_string()) {
        throw Error(ErrorCode::BackendRefusal, "completion has no text content");
    }
    const auto usage = doc.find("usage");
    if (usage == doc.end() || !usage->is_object() || !usage->contains("prompt_tokens") ||
        !usage->contains("completion_tokens")) {
        throw Error(ErrorCode::BackendRefusal, "completion lacks a usage report");
    }
    Completion out;
    out.text = content->get<std::string>();
    out.prompt_tokens = (*usage)["prompt_tokens"].get<std::int64_t>();
    out.completion_tokens = (*usage)["completion_tokens"].get<std::int64_t>();
    if (out.prompt_tokens < 0 || out.completion_tokens < 0) {
        throw Error(ErrorCode::BackendRefusal, "negative token counts in usage report");
    }
    return out;
}

}  // namespace cotflow::llm
