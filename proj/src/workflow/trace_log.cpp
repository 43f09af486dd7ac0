// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/workflow/trace_log.hpp"

#include "cotflow/util.hpp"

#include <chrono>

namespace cotflow::workflow {

using nlohmann::json;

Clock steady_clock() {
    return [] {
        using namespace std::chrono;
        return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
    };
}

TraceLogWriter::TraceLogWriter(const std::filesystem::path& path, std::string run_id, Clock clock)
    : path_(path), run_id_(std::move(run_id)), clock_(std::move(clock)) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    out_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out_) throw Error(ErrorCode::IoError, "cannot open trace log " + path.string());
    if (clock_) origin_ = clock_();
}

void TraceLogWriter::event(std::string_view kind, std::optional<SubtaskKind> subtask, int attempt, json fields) {
    json record{{"v", kTraceLogVersion},
                {"run", run_id_},
                {"event", kind},
                {"subtask", subtask ? to_string(*subtask) : kNoSubtask},
                {"attempt", attempt}};
    if (!fields.contains("prompt_tokens")) fields["prompt_tokens"] = 0;
    if (!fields.contains("completion_tokens")) fields["completion_tokens"] = 0;
    record.update(fields);
    const double now = clock_ ? clock_() - origin_ : 0.0;
    record["wall_ms"] = static_cast<std::int64_t>(now);
    out_ << record.dump() << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::IoError, "cannot append to trace log " + path_.string());
}

json summarize(const WorkflowTrace& trace) {
    json milestones = json::array();
    for (bool m : trace.milestones) milestones.push_back(m);
    json iterations = json::object();
    for (SubtaskKind k : kAllSubtaskKinds) {
        auto it = trace.iterations.find(k);
        iterations[std::string(to_string(k))] = it == trace.iterations.end() ? 0 : it->second;
    }
    const auto non_iter = trace.ledger.totals(Phase::NonIteration);
    const auto iter = trace.ledger.totals(Phase::Iteration);
    json subtasks = json::array();
    for (const auto& s : trace.subtasks) {
        subtasks.push_back({{"kind", to_string(s.kind)}, {"status", to_string(s.status)}, {"attempts", s.attempts}});
    }
    json out{
        {"requirement", trace.requirement_id},
        {"qdcot", trace.config.qdcot_level},
        {"icot", trace.config.icot_level},
        {"max_iterations", trace.config.max_iterations},
        {"seed_case", trace.seed_case},
        {"milestones", milestones},
        {"score", trace.score()},
        {"iterations", iterations},
        {"verification_rounds", trace.verification_rounds},
        {"subtasks", subtasks},
        {"tokens",
         {{"non_iteration", {{"prompt", non_iter.prompt}, {"completion", non_iter.completion}}},
          {"iteration", {{"prompt", iter.prompt}, {"completion", iter.completion}}}}},
        {"ledger_entries", trace.ledger.size()},
        {"artifacts", trace.artifacts},
        {"budget_exhausted", trace.budget_exhausted ? json(to_string(*trace.budget_exhausted)) : json(nullptr)},
        {"abort", trace.abort ? json{{"code", to_string(trace.abort->code)}, {"message", trace.abort->message}}
                              : json(nullptr)},
    };
    return out;
}

std::vector<json> read_trace_log(const std::filesystem::path& path) {
    std::vector<json> out;
    int line_no = 0;
    for (const auto& line : split(read_text_file(path), '\n')) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (record.is_discarded() || !record.is_object()) throw Error(ErrorCode::SchemaError, where + ": not a JSON object");
        if (record.value("v", -1) != kTraceLogVersion) {
            throw Error(ErrorCode::SchemaError, where + ": unsupported trace log version");
        }
        for (const char* key : {"run", "event", "subtask"}) {
            if (!record.contains(key) || !record[key].is_string()) {
                throw Error(ErrorCode::SchemaError, where + ": missing \"" + key + "\"");
            }
        }
        out.push_back(std::move(record));
    }
    return out;
}

}  // namespace cotflow::workflow
