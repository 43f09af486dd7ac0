// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/metrics/metrics.hpp"
#include "cotflow/workflow/trace.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cotflow::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitBelowThreshold = 1,
    kExitUsage = 2,
    kExitConfig = 3,
    kExitMissingScenario = 4,
    kExitMissingCredentials = 5,
    kExitRuntime = 6,
};

/// Everything a command needs; built from defaults, then the --config file,
/// then flags.
struct RunConfig {
    std::string mode = "simulated";
    workflow::AblationConfig ablation;
    metrics::PricingConfig pricing;

    std::string model = "gpt-4o";
    double temperature = 0.01;
    int max_output_tokens = 4096;
    std::string base_url;
    /// Name of the environment variable holding the API key.
    std::string api_key_env = "COTFLOW_API_KEY";
    int request_timeout_s = 120;
    int max_attempts = 3;

    /// "mock" (hashed bag of words) or "http" (embeddings endpoint at base_url).
    std::string embedder = "mock";
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dimension = 1536;

    std::filesystem::path benchmark;
    std::filesystem::path templates;
    std::filesystem::path corpus;  // manifest
    std::filesystem::path index;   // optional prebuilt index
    std::filesystem::path scenario;
    std::filesystem::path out = "cotflow-out";

    int n = 10;
    int k = 1;
    int jobs = 1;
    int threshold = 5;
    std::size_t top_k = 1;
    std::size_t context_budget = 12'000;
    int sandbox_timeout_s = 600;
};

/// Defaults pointing at the data directory shipped with the build.
RunConfig default_config();

/// Applies a JSON config object on top of `cfg`. Relative paths resolve
/// against `base`. Unknown keys raise Error(ConfigError).
void apply_config(RunConfig& cfg, const nlohmann::json& j, const std::filesystem::path& base);

/// Full command line (argv[0] included). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace cotflow::cli
