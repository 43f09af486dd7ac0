// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/llm/http_transport.hpp"

#include "cotflow/common.hpp"

#include <httplib.h>

#include <thread>

namespace cotflow::llm {

namespace {

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

SplitUrl split_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::ConfigError, "base URL lacks a scheme: " + base_url);
    }
    const std::string scheme = base_url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::ConfigError, "unsupported URL scheme: " + scheme);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.prefix = base_url.substr(path_start);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    return out;
}

std::string post_json(const HttpEndpoint& endpoint, const std::string& path,
                      const std::string& body, const RetryPolicy& policy,
                      std::atomic<int>* attempts) {
    const SplitUrl url = split_url(endpoint.base_url);
    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

    const int max_attempts = std::max(1, policy.max_attempts);
    auto backoff = policy.initial_backoff;
    std::string last_failure;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (attempt > 0) {
            if (policy.sleep) {
                policy.sleep(backoff);
            } else {
                std::this_thread::sleep_for(backoff);
            }
            backoff = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.multiplier));
        }
        if (attempts != nullptr) ++*attempts;
        auto result = client.Post(url.prefix + path, headers, body, "application/json");
        if (!result) {
            last_failure = "transport: " + httplib::to_string(result.error());
            continue;
        }
        const int status = result->status;
        if (status >= 200 && status < 300) return result->body;
        if (retryable_status(status)) {
            last_failure = "HTTP " + std::to_string(status) + ": " + result->body;
            continue;
        }
        throw Error(ErrorCode::BackendRefusal, "HTTP " + std::to_string(status) + ": " + result->body);
    }
    throw Error(ErrorCode::TransportError, "gave up after " + std::to_string(max_attempts) +
                                               " attempts (" + last_failure + ")");
}

}  // namespace cotflow::llm
