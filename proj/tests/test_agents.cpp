// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include "cotflow/agents/agents.hpp"
#include "cotflow/agents/templates.hpp"
#include "cotflow/agents/wire.hpp"
#include "cotflow/llm/scripted.hpp"
#include "cotflow/util.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace cotflow;
using namespace cotflow::agents;
using llm::CallKey;
using llm::Completion;

namespace {

const std::string kFailureVerdict = R"({
  "status": "failure",
  "Problem_description": "The extracted maximum yPlus is 0.0, which cannot be right for a wall-bounded flow.",
  "files_to_modify": ["postprocessing_python.py"]
})";

struct Harness {
    explicit Harness(std::map<CallKey, Completion> replies) : backend(std::move(replies)) {
        session = std::make_unique<AgentSession>(backend, testing::templates(), llm::LlmParams{}, ledger, dir.path());
        session->set_observer([this](const AgentCall& c) { calls.push_back(c); });
    }
    testing::TempDir dir;
    llm::ScriptedBackend backend;
    llm::TokenLedger ledger;
    std::unique_ptr<AgentSession> session;
    std::vector<AgentCall> calls;
};

CallKey key(AgentRole r, std::optional<SubtaskKind> k = std::nullopt, int a = 0) { return {r, k, a}; }

}  // namespace

TEST_CASE("templates") {
    CHECK(render_template("a {{x}} b {{y}}", {{"x", "1"}, {"y", "2"}}) == "a 1 b 2");
    CHECK_ERROR_CODE(ErrorCode::TemplateError, render_template("{{missing}}", {}));
    CHECK_ERROR_CODE(ErrorCode::TemplateError, render_template("{{open", {{"open", "x"}}));
    const auto& t = testing::templates();
    CHECK(t.version() == 1);
    for (const char* name : {"architect", "input_writer.rewrite", "reviewer", "verifier", "reprompt"}) {
        CHECK(t.contains(name));
    }
    for (auto k : kAllSubtaskKinds) {
        CHECK(&t.for_role(AgentRole::InputWriter, k) == &t.get("input_writer." + std::string(to_string(k))));
        CHECK(&t.for_role(AgentRole::InputWriter, k, "rewrite") == &t.get("input_writer.rewrite"));
        CHECK(&t.for_role(AgentRole::Reviewer, k) == &t.get("reviewer"));
    }
    CHECK_ERROR_CODE(ErrorCode::TemplateError, t.get("nope"));
    CHECK(role_stem(AgentRole::InputWriter) == "input_writer");
}

TEST_CASE("json object extraction") {
    const auto accept_all = [](const nlohmann::json&) { return true; };
    CHECK(find_json_object("prose {\"a\": 1} more", accept_all)->at("a") == 1);
    CHECK(find_json_object("```json\n{\"a\": \"}\"}\n```", accept_all)->at("a") == "}");
    CHECK_FALSE(find_json_object("no object", accept_all));
    const auto second = find_json_object("{\"x\": 1} {\"status\": \"success\"}",
                                         [](const nlohmann::json& j) { return j.contains("status"); });
    CHECK(second->at("status") == "success");
}

TEST_CASE("plan wire format") {
    const std::vector<PlannedTask> plan{{TaskKind::Simulation, "run pitzDaily with simpleFoam"},
                                        {TaskKind::Postprocessing, "extract max yPlus"}};
    CHECK(parse_plan(render_plan(plan)) == plan);
    const std::vector<PlannedTask> reversed{plan[1], plan[0]};
    CHECK(parse_plan(render_plan(reversed)) == plan);
    CHECK_ERROR_CODE(ErrorCode::ArchitectParseError, parse_plan("I will simulate the case."));
    CHECK_ERROR_CODE(ErrorCode::ArchitectParseError,
                     parse_plan(R"({"tasks": [{"kind": "Postprocessing", "description": "x"}]})"));
    CHECK_ERROR_CODE(ErrorCode::ArchitectParseError,
                     parse_plan(R"({"tasks": [{"kind": "Simulation", "description": "a"},
                                             {"kind": "Simulation", "description": "b"}]})"));
}

TEST_CASE("fileset wire format") {
    FileSet fs{{{"system/controlDict", "endTime 1;\n"}, {"Allrun", "#!/bin/sh\n"}}};
    CHECK(parse_fileset(render_fileset(fs)) == fs);
    CHECK_ERROR_CODE(ErrorCode::EmptyGeneration, parse_fileset(R"({"files": []})"));
    CHECK_ERROR_CODE(ErrorCode::SchemaError, parse_fileset("nothing"));
    FileSet upd{{{"Allrun", "new\n"}, {"0/U", "u\n"}}};
    fs.merge(upd);
    REQUIRE(fs.entries.size() == 3);
    CHECK(fs.find("Allrun")->content == "new\n");
    CHECK(fs.entries[2].path == "0/U");
    CHECK(fs.find("none") == nullptr);
    testing::TempDir dir;
    write_fileset(fs, dir.path());
    CHECK(read_text_file(dir / "0/U") == "u\n");
    CHECK_ERROR_CODE(ErrorCode::PathEscape, write_fileset(FileSet{{{"../x", "y"}}}, dir.path()));
}

TEST_CASE("review wire format") {
    const ReviewFeedback fb{"probe coordinates do not match any cell centre", {"postprocessing_python.py"}};
    CHECK(parse_review(render_review(fb)) == fb);
    CHECK_ERROR_CODE(ErrorCode::ReviewerParseError, parse_review(R"({"diagnosis": "", "files": []})"));
    CHECK_ERROR_CODE(ErrorCode::ReviewerParseError, parse_review("banana"));
}

TEST_CASE("verdict parsing") {
    const auto v = parse_verdict(kFailureVerdict);
    CHECK(v.status == VerdictStatus::Failure);
    CHECK(v.files_to_modify == std::vector<std::string>{"postprocessing_python.py"});
    CHECK(v.problem_description.find("0.0") != std::string::npos);

    CHECK(parse_verdict(R"({"status": "success"})") == Verdict{VerdictStatus::Success, "", {}});
    CHECK(parse_verdict("Here is my verdict:\n```json\n" + kFailureVerdict + "\n```\nThanks.") == v);
    CHECK_ERROR_CODE(ErrorCode::VerifierParseError, parse_verdict("looks fine to me"));
    CHECK_ERROR_CODE(ErrorCode::VerifierParseError, parse_verdict(R"({"status": "maybe"})"));
    CHECK_ERROR_CODE(ErrorCode::VerifierParseError, parse_verdict(R"({"status": "failure"})"));
}

TEST_CASE("verdict render/parse round trip on random verdicts") {
    std::mt19937_64 rng(99);
    const std::vector<std::string> names{"postprocessing_python.py", "controlDict", "0/U", "Allrun", "a \"q\"\n"};
    for (int i = 0; i < 300; ++i) {
        Verdict v;
        v.status = rng() % 2 ? VerdictStatus::Success : VerdictStatus::Failure;
        if (rng() % 2) v.problem_description = "issue " + std::to_string(rng() % 1000) + " with \"quotes\" \\ {}";
        for (std::size_t j = 0, n = rng() % 4; j < n; ++j) v.files_to_modify.push_back(names[rng() % names.size()]);
        if (v.status == VerdictStatus::Failure && v.problem_description.empty() && v.files_to_modify.empty()) {
            v.files_to_modify.push_back("controlDict");
        }
        CHECK(parse_verdict(render_verdict(v)) == v);
    }
}

TEST_CASE("architect call parses a plan and records one entry") {
    const auto plan = render_plan({{TaskKind::Simulation, "s"}, {TaskKind::Postprocessing, "p"}});
    Harness h({{key(AgentRole::Architect), {plan, 900, 120}}});
    const auto tasks = h.session->architect_plan(testing::kPitzYplus, "ctx");
    REQUIRE(tasks.size() == 2);
    CHECK(tasks[0].kind == TaskKind::Simulation);
    CHECK(tasks[1].kind == TaskKind::Postprocessing);
    REQUIRE(h.ledger.size() == 1);
    CHECK(h.ledger.entries()[0].phase == Phase::NonIteration);
    CHECK(h.ledger.totals() == llm::TokenTotals{900, 120});
    CHECK(h.backend.prompts()[0].find(testing::kPitzYplus) != std::string::npos);
}

TEST_CASE("a malformed reply is reprompted once, quoting it") {
    const auto plan = render_plan({{TaskKind::Simulation, "s"}});
    Harness h({{key(AgentRole::Architect, std::nullopt, 0), {"sure, here is a plan", 10, 5}},
               {key(AgentRole::Architect, std::nullopt, 1), {plan, 20, 6}}});
    CHECK(h.session->architect_plan("do a RANS simulation of X", "").size() == 1);
    CHECK(h.ledger.size() == 2);
    REQUIRE(h.calls.size() == 2);
    CHECK_FALSE(h.calls[0].parsed);
    CHECK(h.calls[1].parsed);
    CHECK(h.backend.prompts()[1].find("sure, here is a plan") != std::string::npos);
}

TEST_CASE("a second malformed reply is a hard error") {
    Harness h({{key(AgentRole::Architect, std::nullopt, 0), {"prose", 1, 1}},
               {key(AgentRole::Architect, std::nullopt, 1), {"more prose", 1, 1}}});
    CHECK_ERROR_CODE(ErrorCode::ArchitectParseError, h.session->architect_plan("x", ""));
    CHECK(h.ledger.size() == 2);

    Harness r({{key(AgentRole::Reviewer, SubtaskKind::SimulationRun, 0), {"?", 1, 1}},
               {key(AgentRole::Reviewer, SubtaskKind::SimulationRun, 1), {"??", 1, 1}}});
    sandbox::RunRecord run;
    run.exit_code = 1;
    CHECK_ERROR_CODE(ErrorCode::ReviewerParseError, r.session->review_error(SubtaskKind::SimulationRun, "s", run, {}));

    Harness v({{key(AgentRole::Verifier, std::nullopt, 0), {"?", 1, 1}},
               {key(AgentRole::Verifier, std::nullopt, 1), {"??", 1, 1}}});
    CHECK_ERROR_CODE(ErrorCode::VerifierParseError, v.session->verify_results("x", "y"));
}

TEST_CASE("writes and rewrites land in the workdir with phase tags") {
    const FileSet first{{{"postprocessing_python.py", "tol = 1e-6\ncell_data = True\n"}}};
    const FileSet second{{{"postprocessing_python.py", "tol = 1e-3\npoint_data = True\n"}}};
    const auto k = SubtaskKind::PostprocessScript;
    Harness h({{key(AgentRole::InputWriter, k, 0), {render_fileset(first), 300, 80}},
               {key(AgentRole::InputWriter, k, 1), {render_fileset(second), 500, 90}}});
    const auto w1 = h.session->write_inputs(k, "extract yPlus", testing::kPitzYplus, "", std::nullopt, {});
    CHECK(w1 == first);
    CHECK(read_text_file(h.dir / "postprocessing_python.py") == first.entries[0].content);
    const ReviewFeedback fb{"tolerance too tight; read the array from point data", {"postprocessing_python.py"}};
    const auto w2 = h.session->write_inputs(k, "extract yPlus", testing::kPitzYplus, "", fb, w1, "No data points found");
    CHECK(w2 == second);
    CHECK(read_text_file(h.dir / "postprocessing_python.py").find("1e-3") != std::string::npos);
    REQUIRE(h.ledger.size() == 2);
    CHECK(h.ledger.entries()[0].phase == Phase::NonIteration);
    CHECK(h.ledger.entries()[1].phase == Phase::Iteration);
    const auto& rewrite_prompt = h.backend.prompts()[1];
    CHECK(rewrite_prompt.find("tol = 1e-6") != std::string::npos);
    CHECK(rewrite_prompt.find("No data points found") != std::string::npos);
    CHECK(rewrite_prompt.find("tolerance too tight") != std::string::npos);
}

TEST_CASE("empty generation and path escapes are rejected") {
    const auto k = SubtaskKind::SimulationRun;
    Harness h({{key(AgentRole::InputWriter, k, 0), {R"({"files": []})", 1, 1}},
               {key(AgentRole::InputWriter, k, 1), {R"({"files": []})", 1, 1}}});
    CHECK_ERROR_CODE(ErrorCode::EmptyGeneration, h.session->write_inputs(k, "s", "r", "", std::nullopt, {}));

    Harness p({{key(AgentRole::InputWriter, k, 0), {R"({"files": [{"path": "../evil", "content": "x"}]})", 1, 1}},
               {key(AgentRole::InputWriter, k, 1), {R"({"files": [{"path": "Allrun", "content": "x"}]})", 1, 1}}});
    CHECK(p.session->write_inputs(k, "s", "r", "", std::nullopt, {}).entries[0].path == "Allrun");
    CHECK_FALSE(std::filesystem::exists(p.dir.path().parent_path() / "evil"));
}

TEST_CASE("reviewer sees the error text, or the exit code alone") {
    const auto k = SubtaskKind::PostprocessScript;
    const ReviewFeedback fb{"the probe x = 0.05 matches no cell; use nearest-cell lookup", {"postprocessing_python.py"}};
    Harness h({{key(AgentRole::Reviewer, k, 0), {render_review(fb), 700, 60}},
               {key(AgentRole::Reviewer, k, 1), {render_review({"nonzero exit without output", {}}), 1, 1}}});
    sandbox::RunRecord run;
    run.exit_code = 1;
    run.stderr_text = "No data points found at X = 0.05 m";
    CHECK(h.session->review_error(k, "extract profile", run, {}) == fb);
    CHECK(h.backend.prompts()[0].find("No data points found at X = 0.05 m") != std::string::npos);
    CHECK(h.ledger.entries()[0].phase == Phase::Iteration);

    sandbox::RunRecord silent;
    silent.exit_code = 3;
    const auto excerpt = error_excerpt(silent);
    CHECK_FALSE(excerpt.empty());
    CHECK(excerpt.find("exit code 3") != std::string::npos);
    CHECK_FALSE(h.session->review_error(k, "extract profile", silent, {}).diagnosis.empty());
    CHECK(h.backend.prompts()[1].find("exit code 3") != std::string::npos);
}

TEST_CASE("verifier receives the artifact summary") {
    Harness h({{key(AgentRole::Verifier, std::nullopt, 0), {kFailureVerdict, 400, 50}},
               {key(AgentRole::Verifier, std::nullopt, 1), {R"({"status": "success"})", 400, 10}}});
    const auto v0 = h.session->verify_results(testing::kPitzYplus, describe_artifacts({}, "max_yplus = 0.0\n"));
    CHECK(v0.status == VerdictStatus::Failure);
    CHECK(v0.files_to_modify == std::vector<std::string>{"postprocessing_python.py"});
    CHECK(h.backend.prompts()[0].find("max_yplus = 0.0") != std::string::npos);
    const auto v1 = h.session->verify_results(testing::kPitzYplus, describe_artifacts({}, "max_yplus = 19.62\n"));
    CHECK(v1.status == VerdictStatus::Success);
    CHECK(h.ledger.entries()[1].phase == Phase::NonIteration);
}

TEST_CASE("artifact scanning") {
    testing::TempDir dir;
    write_text_file(dir / "U_profile.csv", "x,U\n0.0,1.0\n0.1,1.5\n0.2,2.0\n");
    write_text_file(dir / "empty.csv", "x,U\n");
    write_text_file(dir / "postprocessing_python.py", "print(1)\n");
    // Minimal PNG header with a 640 x 480 IHDR.
    const std::string png("\x89PNG\r\n\x1a\n\0\0\0\rIHDR\0\0\x02\x80\0\0\x01\xe0\x08\x02\0\0\0", 29);
    write_text_file(dir / "U_contour.png", png);
    const auto arts = scan_artifacts(dir.path(), {"postprocessing_python.py"});
    REQUIRE(arts.size() == 3);
    CHECK(arts[0].path == "U_contour.png");
    REQUIRE(arts[0].image_size);
    CHECK(arts[0].image_size->first == 640);
    CHECK(arts[0].image_size->second == 480);
    CHECK(arts[1].path == "U_profile.csv");
    CHECK(arts[1].data_rows == 3u);
    CHECK(arts[2].data_rows == 0u);
    CHECK(count_data_rows(dir / "U_profile.csv") == 3);
    const auto text = describe_artifacts(arts, "done\n");
    CHECK(text.find("done\n") < text.find("U_contour.png"));
    CHECK(text.find("640") != std::string::npos);
    CHECK(text.find("U_profile.csv") != std::string::npos);
}
