// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/metrics/run_summary.hpp"

#include "cotflow/workflow/trace_log.hpp"

namespace cotflow::metrics {

using nlohmann::json;

namespace {

llm::TokenTotals totals_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("prompt") || !j.contains("completion")) {
        throw Error(ErrorCode::SchemaError, where + ": needs prompt and completion");
    }
    return {j["prompt"].get<std::int64_t>(), j["completion"].get<std::int64_t>()};
}

json totals_to_json(const llm::TokenTotals& t) { return {{"prompt", t.prompt}, {"completion", t.completion}}; }

}  // namespace

int RunSummary::total_iterations() const {
    int total = 0;
    for (const auto& [k, n] : iterations) total += n;
    return total;
}

RunSummary summarize_trace(const workflow::WorkflowTrace& trace) {
    RunSummary s;
    s.run_id = trace.run_id;
    s.requirement_id = trace.requirement_id;
    s.qdcot_level = trace.config.qdcot_level;
    s.icot_level = trace.config.icot_level;
    s.score = trace.score();
    s.milestones = trace.milestones;
    for (SubtaskKind k : kAllSubtaskKinds) {
        auto it = trace.iterations.find(k);
        s.iterations[k] = it == trace.iterations.end() ? 0 : it->second;
    }
    s.tokens = categorize_tokens(trace.ledger);
    s.verification_rounds = trace.verification_rounds;
    s.ledger_entries = trace.ledger.size();
    if (trace.abort) s.abort_code = std::string(to_string(trace.abort->code));
    return s;
}

json to_json(const RunSummary& s) {
    json milestones = json::array();
    for (bool m : s.milestones) milestones.push_back(m);
    json iterations = json::object();
    for (const auto& [k, n] : s.iterations) iterations[std::string(to_string(k))] = n;
    return {{"run", s.run_id},
            {"requirement", s.requirement_id},
            {"qdcot", s.qdcot_level},
            {"icot", s.icot_level},
            {"score", s.score},
            {"milestones", milestones},
            {"iterations", iterations},
            {"tokens",
             {{"non_iteration", totals_to_json(s.tokens.non_iteration)},
              {"iteration", totals_to_json(s.tokens.iteration)}}},
            {"verification_rounds", s.verification_rounds},
            {"ledger_entries", s.ledger_entries},
            {"abort", s.abort_code ? json(*s.abort_code) : json(nullptr)}};
}

RunSummary run_summary_from_json(const json& j, const std::string& where) {
    try {
        RunSummary s;
        s.run_id = j.at("run").get<std::string>();
        s.requirement_id = j.at("requirement").get<std::string>();
        s.qdcot_level = j.at("qdcot").get<int>();
        s.icot_level = j.at("icot").get<int>();
        s.score = j.at("score").get<int>();
        const auto& m = j.at("milestones");
        if (!m.is_array() || m.size() != workflow::kMilestoneCount) {
            throw Error(ErrorCode::SchemaError, where + ".milestones: expected 8 booleans");
        }
        for (std::size_t i = 0; i < workflow::kMilestoneCount; ++i) s.milestones[i] = m[i].get<bool>();
        for (const auto& [name, n] : j.at("iterations").items()) {
            auto kind = parse_subtask_kind(name);
            if (!kind) throw Error(ErrorCode::SchemaError, where + ".iterations: unknown kind " + name);
            s.iterations[*kind] = n.get<int>();
        }
        const auto& t = j.at("tokens");
        s.tokens.non_iteration = totals_from_json(t.at("non_iteration"), where + ".tokens.non_iteration");
        s.tokens.iteration = totals_from_json(t.at("iteration"), where + ".tokens.iteration");
        s.verification_rounds = j.at("verification_rounds").get<int>();
        s.ledger_entries = j.at("ledger_entries").get<std::size_t>();
        const auto& abort = j.at("abort");
        if (abort.is_string()) s.abort_code = abort.get<std::string>();
        if (abort.is_object()) s.abort_code = abort.at("code").get<std::string>();
        if (s.score != workflow::ladder_score(s.milestones)) {
            throw Error(ErrorCode::SchemaError, where + ": score disagrees with milestones");
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, where + ": " + e.what());
    }
}

RunSummary read_run_summary(const std::filesystem::path& trace_log) {
    const auto records = workflow::read_trace_log(trace_log);
    if (records.empty() || records.back()["event"] != "summary") {
        throw Error(ErrorCode::SchemaError, trace_log.string() + ": log does not end with a summary record");
    }
    TokenCategories recounted;
    std::size_t calls = 0;
    for (const auto& r : records) {
        if (!r.contains("phase")) continue;
        const auto phase = parse_phase(r["phase"].get<std::string>());
        if (!phase) throw Error(ErrorCode::SchemaError, trace_log.string() + ": unknown phase");
        auto& bucket = *phase == Phase::Iteration ? recounted.iteration : recounted.non_iteration;
        bucket.prompt += r.value("prompt_tokens", std::int64_t{0});
        bucket.completion += r.value("completion_tokens", std::int64_t{0});
        ++calls;
    }
    RunSummary s = run_summary_from_json(records.back(), trace_log.string() + " summary");
    if (!(s.tokens == recounted) || s.ledger_entries != calls) {
        throw Error(ErrorCode::SchemaError, trace_log.string() + ": call records disagree with the summary");
    }
    return s;
}

}  // namespace cotflow::metrics
