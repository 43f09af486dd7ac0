// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/workflow/trace.hpp"

#include "cotflow/agents/agents.hpp"
#include "cotflow/sandbox/run_record.hpp"

#include <cmath>
#include <regex>

namespace cotflow::workflow {

void AblationConfig::validate() const {
    if (qdcot_level < 0 || qdcot_level > 2) {
        throw Error(ErrorCode::ConfigError, "qdcot_level must be in 0..2, got " + std::to_string(qdcot_level));
    }
    if (icot_level < 0 || icot_level > 3) {
        throw Error(ErrorCode::ConfigError, "icot_level must be in 0..3, got " + std::to_string(icot_level));
    }
    if (max_iterations < 1) throw Error(ErrorCode::ConfigError, "max_iterations must be at least 1");
    if (max_verification_rounds < 1) {
        throw Error(ErrorCode::ConfigError, "max_verification_rounds must be at least 1");
    }
}

void OraclePredicate::validate() const {
    if (target.empty()) throw Error(ErrorCode::SchemaError, "oracle target is empty");
    if (kind == Kind::ScalarInRange) {
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorCode::SchemaError, "oracle bounds must be finite");
        if (lo > hi) throw Error(ErrorCode::SchemaError, "oracle bounds are inverted");
    }
}

std::string_view to_string(OraclePredicate::Kind kind) {
    switch (kind) {
        case OraclePredicate::Kind::ScalarInRange: return "ScalarInRange";
        case OraclePredicate::Kind::FileNonEmpty: return "FileNonEmpty";
        case OraclePredicate::Kind::SeriesNonEmpty: return "SeriesNonEmpty";
    }
    return "?";
}

std::optional<OraclePredicate::Kind> parse_oracle_kind(std::string_view text) {
    for (auto k : {OraclePredicate::Kind::ScalarInRange, OraclePredicate::Kind::FileNonEmpty,
                   OraclePredicate::Kind::SeriesNonEmpty}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

std::optional<double> find_scalar(std::string_view text, std::string_view name) {
    std::string escaped;
    for (char c : name) {
        if (std::string_view(".^$|()[]{}*+?\\").find(c) != std::string_view::npos) escaped += '\\';
        escaped += c;
    }
    const std::regex re("(^|[^A-Za-z0-9_])" + escaped +
                        R"(\s*[=:]\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))");
    std::optional<double> last;
    for (std::cregex_iterator it(text.data(), text.data() + text.size(), re), end; it != end; ++it) {
        const double v = std::strtod((*it)[2].str().c_str(), nullptr);
        if (std::isfinite(v)) last = v;
    }
    return last;
}

bool evaluate_oracle(const OraclePredicate& oracle, const std::filesystem::path& workdir,
                     std::string_view script_output) {
    std::error_code ec;
    switch (oracle.kind) {
        case OraclePredicate::Kind::ScalarInRange: {
            const auto v = find_scalar(script_output, oracle.target);
            return v && *v >= oracle.lo && *v <= oracle.hi;
        }
        case OraclePredicate::Kind::FileNonEmpty: {
            const auto path = sandbox::resolve_inside(workdir, oracle.target);
            return std::filesystem::is_regular_file(path, ec) && std::filesystem::file_size(path, ec) > 0;
        }
        case OraclePredicate::Kind::SeriesNonEmpty: {
            const auto path = sandbox::resolve_inside(workdir, oracle.target);
            return std::filesystem::is_regular_file(path, ec) && agents::count_data_rows(path) > 0;
        }
    }
    return false;
}

nlohmann::json oracle_to_json(const OraclePredicate& oracle) {
    nlohmann::json j{{"kind", to_string(oracle.kind)}, {"target", oracle.target}};
    if (oracle.kind == OraclePredicate::Kind::ScalarInRange) {
        j["lo"] = oracle.lo;
        j["hi"] = oracle.hi;
    }
    return j;
}

OraclePredicate oracle_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, where + ": oracle must be an object");
    OraclePredicate o;
    const auto kind = j.contains("kind") && j["kind"].is_string()
                          ? parse_oracle_kind(j["kind"].get<std::string>())
                          : std::nullopt;
    if (!kind) throw Error(ErrorCode::SchemaError, where + ".kind: unknown oracle kind");
    o.kind = *kind;
    if (!j.contains("target") || !j["target"].is_string()) {
        throw Error(ErrorCode::SchemaError, where + ".target: string required");
    }
    o.target = j["target"].get<std::string>();
    if (o.kind == OraclePredicate::Kind::ScalarInRange) {
        for (const char* key : {"lo", "hi"}) {
            if (!j.contains(key) || !j[key].is_number()) {
                throw Error(ErrorCode::SchemaError, where + "." + key + ": number required");
            }
        }
        o.lo = j["lo"].get<double>();
        o.hi = j["hi"].get<double>();
    }
    try {
        o.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::SchemaError, where + ": " + e.what());
    }
    return o;
}

std::string_view to_string(SubtaskStatus status) {
    switch (status) {
        case SubtaskStatus::Pending: return "Pending";
        case SubtaskStatus::Succeeded: return "Succeeded";
        case SubtaskStatus::Failed: return "Failed";
    }
    return "?";
}

Milestones compute_milestones(const MilestoneInputs& in) {
    Milestones raw{};
    if (in.simulation_tag) {
        const OutcomeTag t = *in.simulation_tag;
        raw[0] = t != OutcomeTag::GridFail;
        raw[1] = raw[0] && t != OutcomeTag::RunFail;
        raw[2] = t == OutcomeTag::Completed;
        raw[3] = raw[2];
    }
    const bool vacuous = !in.postprocessing_requested && raw[3];
    raw[4] = in.command_ok ? *in.command_ok : vacuous;
    raw[5] = in.script_ok ? *in.script_ok : vacuous;
    raw[6] = in.verifier_passed;
    raw[7] = in.oracle_passed;

    Milestones out{};
    bool prefix = true;
    for (std::size_t i = 0; i < kMilestoneCount; ++i) {
        prefix = prefix && raw[i];
        out[i] = prefix;
    }
    return out;
}

int ladder_score(const Milestones& milestones) {
    int leading = 0;
    while (leading < static_cast<int>(kMilestoneCount) && milestones[static_cast<std::size_t>(leading)]) ++leading;
    return leading <= 2 ? leading : leading - 1;
}

int WorkflowTrace::total_iterations() const {
    int total = 0;
    for (const auto& [kind, n] : iterations) total += n;
    return total;
}

}  // namespace cotflow::workflow
