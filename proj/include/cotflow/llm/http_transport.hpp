// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <string>

namespace cotflow::llm {

struct HttpEndpoint {
    /// scheme://host[:port][/prefix]
    std::string base_url;
    /// Sent as a bearer token when non-empty.
    std::string api_key;
    std::chrono::milliseconds timeout{120'000};
};

/// Bounded exponential backoff for transient transport failures.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    /// Injected so tests do not sleep. Defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;
};

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash, may be empty
};

/// Throws Error(ConfigError) for URLs without an http(s) scheme.
SplitUrl split_url(const std::string& base_url);

/// POSTs a JSON body and returns the response body for 2xx replies.
///
/// Connection failures and 408/429/5xx replies are retried according to
/// `policy`; exhaustion raises Error(TransportError). Any other status raises
/// Error(BackendRefusal) carrying the status and body verbatim.
/// `attempts`, when given, is incremented once per request sent.
std::string post_json(const HttpEndpoint& endpoint, const std::string& path,
                      const std::string& body, const RetryPolicy& policy,
                      std::atomic<int>* attempts = nullptr);

}  // namespace cotflow::llm
