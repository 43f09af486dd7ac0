// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/agents/agents.hpp"

#include "cotflow/sandbox/run_record.hpp"
#include "cotflow/util.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

namespace cotflow::agents {

namespace {

constexpr std::array<std::string_view, 10> kArtifactExtensions{
    ".png", ".jpg", ".jpeg", ".svg", ".pdf", ".csv", ".dat", ".json", ".txt", ".xy"};

std::optional<std::pair<std::uint32_t, std::uint32_t>> png_size(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char header[24] = {};
    if (!in.read(reinterpret_cast<char*>(header), sizeof header)) return std::nullopt;
    static constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (!std::equal(std::begin(kSignature), std::end(kSignature), header)) return std::nullopt;
    auto be32 = [&](int at) {
        return (std::uint32_t{header[at]} << 24) | (std::uint32_t{header[at + 1]} << 16) |
               (std::uint32_t{header[at + 2]} << 8) | std::uint32_t{header[at + 3]};
    };
    return std::make_pair(be32(16), be32(20));
}

std::string tail_chars(std::string_view text, std::size_t max_chars) {
    if (text.size() <= max_chars) return std::string(text);
    return "[...]" + std::string(text.substr(text.size() - max_chars));
}

}  // namespace

std::size_t count_data_rows(const std::filesystem::path& path) {
    std::size_t rows = 0;
    for (const auto& line : split(read_text_file(path), '\n')) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.find_first_of("0123456789") != std::string_view::npos &&
            t.find_first_not_of("0123456789.eE+-,; \t") == std::string_view::npos) {
            ++rows;
        }
    }
    return rows;
}

std::vector<ArtifactInfo> scan_artifacts(const std::filesystem::path& workdir,
                                         const std::vector<std::string>& inputs) {
    const std::set<std::string> skip(inputs.begin(), inputs.end());
    std::vector<ArtifactInfo> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(workdir, ec)) return out;
    for (auto it = std::filesystem::recursive_directory_iterator(workdir, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file()) continue;
        const auto rel = std::filesystem::relative(it->path(), workdir).generic_string();
        if (rel.rfind("system/", 0) == 0 || rel.rfind("constant/", 0) == 0) continue;
        if (skip.contains(rel)) continue;
        std::string ext = it->path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (std::find(kArtifactExtensions.begin(), kArtifactExtensions.end(), ext) == kArtifactExtensions.end()) {
            continue;
        }
        ArtifactInfo info{rel, it->file_size(), std::nullopt, std::nullopt};
        if (ext == ".csv" || ext == ".dat" || ext == ".xy") info.data_rows = count_data_rows(it->path());
        if (ext == ".png") info.image_size = png_size(it->path());
        out.push_back(std::move(info));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return out;
}

std::string describe_artifacts(const std::vector<ArtifactInfo>& artifacts, std::string_view script_output) {
    std::string out = "Post-processing script output:\n";
    out += script_output.empty() ? std::string("(none)\n") : std::string(script_output);
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += "Artifacts:\n";
    if (artifacts.empty()) out += "(none)\n";
    for (const auto& a : artifacts) {
        out += "- " + a.path + ": " + std::to_string(a.bytes) + " bytes";
        if (a.image_size) {
            out += ", image " + std::to_string(a.image_size->first) + "x" + std::to_string(a.image_size->second);
        }
        if (a.data_rows) {
            out += *a.data_rows == 0 ? std::string(", data series EMPTY")
                                     : ", " + std::to_string(*a.data_rows) + " data rows";
        }
        out += '\n';
    }
    return out;
}

std::string error_excerpt(const sandbox::RunRecord& run, std::size_t max_chars) {
    std::string out = "exit code " + std::to_string(run.exit_code);
    if (run.outcome_tag) out += " (" + std::string(to_string(*run.outcome_tag)) + ")";
    if (!run.note.empty()) out += "; " + run.note;
    out += '\n';
    if (run.stderr_text.empty() && run.stdout_text.empty()) {
        out += "No output was captured; diagnose from the exit code and the files.\n";
        return out;
    }
    if (!run.stderr_text.empty()) out += "stderr:\n" + tail_chars(run.stderr_text, max_chars) + "\n";
    if (!run.stdout_text.empty()) out += "stdout:\n" + tail_chars(run.stdout_text, max_chars) + "\n";
    return out;
}

AgentSession::AgentSession(llm::LlmBackend& backend, const TemplateStore& templates, llm::LlmParams params,
                           llm::TokenLedger& ledger, std::filesystem::path workdir)
    : backend_(backend),
      templates_(templates),
      params_(std::move(params)),
      ledger_(ledger),
      workdir_(std::move(workdir)) {}

int AgentSession::next_attempt(AgentRole role, std::optional<SubtaskKind> kind) {
    return attempts_[{role, kind}]++;
}

template <typename T>
T AgentSession::call(AgentRole role, std::optional<SubtaskKind> kind, Phase phase, const std::string& prompt,
                     ErrorCode failure_code, const std::function<T(std::string_view)>& parse) {
    std::string current_prompt = prompt;
    for (int round = 0; round < 2; ++round) {
        const llm::CallKey key{role, kind, next_attempt(role, kind)};
        const llm::Completion completion = backend_.complete({current_prompt, params_, key});
        llm::record(ledger_, role, kind, phase, completion);
        AgentCall event{key, phase, completion.prompt_tokens, completion.completion_tokens, false};
        try {
            T parsed = parse(completion.text);
            event.parsed = true;
            if (observer_) observer_(event);
            return parsed;
        } catch (const Error& e) {
            if (observer_) observer_(event);
            if (round == 1) {
                if (e.code() == ErrorCode::EmptyGeneration) throw;
                throw Error(failure_code, std::string(to_string(role)) + " reply unusable after reprompt: " + e.what());
            }
            current_prompt = prompt + "\n\n" +
                             render_template(templates_.get("reprompt"),
                                             {{"malformed", completion.text}, {"problem", e.what()}});
        }
    }
    throw Error(failure_code, "unreachable");
}

std::vector<PlannedTask> AgentSession::architect_plan(std::string_view requirement,
                                                      std::string_view retrieved_context) {
    const std::string prompt = render_template(
        templates_.for_role(AgentRole::Architect, std::nullopt),
        {{"requirement", std::string(requirement)}, {"context", std::string(retrieved_context)}});
    return call<std::vector<PlannedTask>>(AgentRole::Architect, std::nullopt, Phase::NonIteration, prompt,
                                          ErrorCode::ArchitectParseError, &parse_plan);
}

FileSet AgentSession::write_inputs(SubtaskKind kind, std::string_view subtask_description,
                                   std::string_view requirement, std::string_view context,
                                   const std::optional<ReviewFeedback>& feedback, const FileSet& previous,
                                   std::string_view error_text) {
    const bool rewrite = feedback.has_value();
    TemplateValues values{
        {"requirement", std::string(requirement)},
        {"subtask", std::string(to_string(kind))},
        {"task", std::string(subtask_description)},
        {"context", std::string(context)},
        {"files", previous.empty() ? std::string("(none)\n") : previous.render()},
        {"feedback", rewrite ? feedback->diagnosis : std::string()},
        {"suggested_files", rewrite ? join(feedback->suggested_files, ", ") : std::string()},
        {"error", std::string(error_text)},
    };
    const std::string prompt = render_template(
        templates_.for_role(AgentRole::InputWriter, kind, rewrite ? "rewrite" : ""), values);
    const auto& workdir = workdir_;
    FileSet files = call<FileSet>(AgentRole::InputWriter, kind, rewrite ? Phase::Iteration : Phase::NonIteration,
                                  prompt, ErrorCode::SchemaError, [&workdir](std::string_view text) {
                                      FileSet parsed = parse_fileset(text);
                                      for (const auto& e : parsed.entries) sandbox::resolve_inside(workdir, e.path);
                                      return parsed;
                                  });
    write_fileset(files, workdir_);
    return files;
}

ReviewFeedback AgentSession::review_error(SubtaskKind kind, std::string_view subtask_description,
                                          const sandbox::RunRecord& run, const FileSet& files) {
    const std::string prompt = render_template(templates_.for_role(AgentRole::Reviewer, kind),
                                               {{"subtask", std::string(to_string(kind))},
                                                {"task", std::string(subtask_description)},
                                                {"command", run.command},
                                                {"exit_code", std::to_string(run.exit_code)},
                                                {"error", error_excerpt(run)},
                                                {"files", files.empty() ? std::string("(none)\n") : files.render()}});
    return call<ReviewFeedback>(AgentRole::Reviewer, kind, Phase::Iteration, prompt, ErrorCode::ReviewerParseError,
                                &parse_review);
}

Verdict AgentSession::verify_results(std::string_view requirement, std::string_view artifact_summary) {
    const std::string prompt = render_template(
        templates_.for_role(AgentRole::Verifier, std::nullopt),
        {{"requirement", std::string(requirement)}, {"artifacts", std::string(artifact_summary)}});
    return call<Verdict>(AgentRole::Verifier, std::nullopt, Phase::NonIteration, prompt,
                         ErrorCode::VerifierParseError, &parse_verdict);
}

}  // namespace cotflow::agents
