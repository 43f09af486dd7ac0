// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/llm/backend.hpp"
#include "cotflow/llm/http_transport.hpp"

#include <atomic>
#include <string>
#include <string_view>

namespace cotflow::llm {

/// Client for an OpenAI-style chat-completions endpoint. Token counts come
/// from the response's `usage` object.
class HttpChatBackend final : public LlmBackend {
public:
    HttpChatBackend(HttpEndpoint endpoint, RetryPolicy policy = {},
                    std::string path = "/v1/chat/completions");

    Completion complete(const CompletionRequest& request) override;

    /// Requests sent over the lifetime of the backend, including retries.
    int requests_sent() const { return attempts_.load(); }

private:
    HttpEndpoint endpoint_;
    RetryPolicy policy_;
    std::string path_;
    std::atomic<int> attempts_{0};
};

/// Request body for one single-message chat completion.
std::string build_chat_request(const CompletionRequest& request);

/// Extracts choices[0].message.content and the usage counts. Throws
/// Error(BackendRefusal) when the body is not a usable completion.
Completion parse_chat_response(std::string_view body);

}  // namespace cotflow::llm
