// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/bench/scenarios.hpp"

#include "cotflow/scenario/script.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace cotflow::bench {

std::vector<TaskProfile> profiles_from_table(const metrics::ResultsTable& table) {
    std::vector<TaskProfile> out;
    for (const auto& row : table.rows) {
        if (!row.sim_iterations || !row.post_iterations || !row.script_iterations) {
            throw Error(ErrorCode::SchemaError, "row " + row.task_id + " lacks per-category iterations");
        }
        out.push_back({row.task_id, row.executability, row.pass_at_1 / 100.0, *row.sim_iterations,
                       *row.post_iterations, *row.script_iterations, row.prompt_tokens, row.completion_tokens});
    }
    return out;
}

namespace {

// Failure classes, by what they pin down.
enum class Cls { Flawless, OracleFail, Rejected, ScriptDead, CommandDead, SimDead };

int rounded(double v) { return static_cast<int>(std::lround(v)); }

// Spreads `total` over the samples selected by `eligible`, at most `cap` each.
void spread(std::vector<SamplePlan>& plans, const std::vector<Cls>& cls, int total,
            bool (*eligible)(Cls), int SamplePlan::*field) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        if (eligible(cls[i])) idx.push_back(i);
    }
    if (idx.empty()) return;
    const int k = static_cast<int>(idx.size());
    for (int j = 0; j < k; ++j) plans[idx[static_cast<std::size_t>(j)]].*field = total / k + (j < total % k ? 1 : 0);
}

}  // namespace

std::vector<SamplePlan> plan_samples(const TaskProfile& profile, int n, const workflow::AblationConfig& cfg) {
    cfg.validate();
    if (n < 1) throw Error(ErrorCode::ConfigError, "n must be at least 1");
    const int cap = cfg.max_iterations;
    const int c = std::clamp(rounded(profile.pass_rate * n), 0, n);
    const int m = n - c;
    const int r = std::clamp(rounded(profile.executability * n) - 7 * c, 0, 6 * m);
    const int i_sim = std::clamp(rounded(profile.sim_iterations * n), 0, cap * n);
    const int i_post = std::clamp(rounded(profile.post_iterations * n), 0, cap * n);
    const int i_script = std::clamp(rounded(profile.script_iterations * n), 0, cap * n);

    // counts: sim-dead a, command-dead b, script-dead s, rejected d, oracle-fail e
    std::tuple<int, int, int, int, int, int> best{1 << 30, 0, 0, 0, 0, 0};
    for (int a = 0; a <= m; ++a) {
        if (cap * a > i_sim) break;
        for (int b = 0; a + b <= m; ++b) {
            if (cap * b > i_post || i_post > cap * (n - a)) continue;
            for (int s = 0; a + b + s <= m; ++s) {
                if (cap * s > i_script || i_script > cap * (n - a - b)) continue;
                for (int d = 0; a + b + s + d <= m; ++d) {
                    const int e = m - a - b - s - d;
                    const int lo = 3 * b + 4 * s + 5 * d + 6 * e;
                    const int hi = lo + 2 * a;
                    const int dist = r < lo ? lo - r : (r > hi ? r - hi : 0);
                    const std::tuple<int, int, int, int, int, int> key{dist, -e, -d, -s, -b, a};
                    if (key < best) best = key;
                }
            }
        }
    }
    const auto [dist, ne, nd, ns, nb, a] = best;
    (void)dist;
    const int e = -ne;
    const int d = -nd;
    const int s = -ns;
    const int b = -nb;

    std::vector<Cls> cls;
    cls.insert(cls.end(), static_cast<std::size_t>(c), Cls::Flawless);
    cls.insert(cls.end(), static_cast<std::size_t>(e), Cls::OracleFail);
    cls.insert(cls.end(), static_cast<std::size_t>(d), Cls::Rejected);
    cls.insert(cls.end(), static_cast<std::size_t>(s), Cls::ScriptDead);
    cls.insert(cls.end(), static_cast<std::size_t>(b), Cls::CommandDead);
    cls.insert(cls.end(), static_cast<std::size_t>(a), Cls::SimDead);

    std::vector<SamplePlan> plans(static_cast<std::size_t>(n));
    const int lo = 3 * b + 4 * s + 5 * d + 6 * e;
    const int dead_sum = std::clamp(r - lo, 0, 2 * a);
    int dead_seen = 0;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        auto& p = plans[i];
        switch (cls[i]) {
            case Cls::Flawless: p.expected_score = 7; break;
            case Cls::OracleFail:
                p.expected_score = 6;
                p.plan.oracle_ok = false;
                break;
            case Cls::Rejected:
                p.expected_score = 5;
                p.plan.rejections.assign(static_cast<std::size_t>(cfg.max_verification_rounds),
                                         {"postprocessing_python.py"});
                break;
            case Cls::ScriptDead:
                p.expected_score = 4;
                p.plan.script.permanent = true;
                p.script_iterations = cap;
                break;
            case Cls::CommandDead:
                p.expected_score = 3;
                p.plan.command.permanent = true;
                p.post_iterations = cap;
                break;
            case Cls::SimDead: {
                const int score = dead_sum / a + (dead_seen < dead_sum % a ? 1 : 0);
                ++dead_seen;
                p.expected_score = score;
                p.plan.simulation.permanent = true;
                p.plan.simulation_failure = score == 0   ? OutcomeTag::GridFail
                                            : score == 1 ? OutcomeTag::RunFail
                                                         : OutcomeTag::Diverged;
                p.sim_iterations = cap;
                break;
            }
        }
    }
    spread(plans, cls, i_sim - cap * a, [](Cls k) { return k != Cls::SimDead; }, &SamplePlan::sim_iterations);
    spread(plans, cls, i_post - cap * b,
           [](Cls k) { return k != Cls::SimDead && k != Cls::CommandDead; }, &SamplePlan::post_iterations);
    spread(plans, cls, i_script - cap * s,
           [](Cls k) { return k == Cls::Flawless || k == Cls::OracleFail || k == Cls::Rejected; },
           &SamplePlan::script_iterations);
    for (std::size_t i = 0; i < plans.size(); ++i) {
        auto& p = plans[i];
        if (!p.plan.simulation.permanent) p.plan.simulation.failures = p.sim_iterations;
        if (!p.plan.command.permanent) p.plan.command.failures = p.post_iterations;
        if (!p.plan.script.permanent) p.plan.script.failures = p.script_iterations;
    }
    return plans;
}

namespace {

void rescale(std::vector<std::int64_t*>& counts, std::int64_t total) {
    std::int64_t sum = 0;
    for (auto* c : counts) sum += *c;
    if (total < 0 || sum == 0) return;
    std::vector<std::pair<long double, std::size_t>> rest;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const long double exact = static_cast<long double>(*counts[i]) * total / sum;
        const auto whole = static_cast<std::int64_t>(std::floor(exact));
        rest.emplace_back(exact - whole, i);
        *counts[i] = whole;
        assigned += whole;
    }
    std::stable_sort(rest.begin(), rest.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::int64_t j = 0; j < total - assigned; ++j) ++*counts[rest[static_cast<std::size_t>(j)].second];
}

}  // namespace

void calibrate_tokens(std::vector<scenario::ScenarioScript>& scripts, std::int64_t prompt_total,
                      std::int64_t completion_total) {
    std::vector<std::int64_t*> prompt;
    std::vector<std::int64_t*> completion;
    for (auto& s : scripts) {
        for (auto& [key, reply] : s.responses) {
            prompt.push_back(&reply.prompt_tokens);
            completion.push_back(&reply.completion_tokens);
        }
    }
    rescale(prompt, prompt_total);
    rescale(completion, completion_total);
}

std::size_t write_scenario_family(const std::vector<BenchTask>& tasks, const std::vector<TaskProfile>& profiles,
                                  int n, const std::filesystem::path& dir, const workflow::AblationConfig& cfg) {
    std::size_t written = 0;
    for (const auto& task : tasks) {
        const auto it = std::find_if(profiles.begin(), profiles.end(),
                                     [&](const TaskProfile& p) { return p.task_id == task.id; });
        if (it == profiles.end()) throw Error(ErrorCode::ConfigError, "no profile for task " + task.id);
        const auto plans = plan_samples(*it, n, cfg);
        std::vector<scenario::ScenarioScript> scripts;
        std::vector<scenario::BuildInput> inputs;
        for (int s = 0; s < n; ++s) {
            const auto& plan = plans[static_cast<std::size_t>(s)];
            inputs.push_back({task.requirement, task.oracle, plan.plan,
                              "task " + task.id + " sample " + std::to_string(s) + ": expected score " +
                                  std::to_string(plan.expected_score)});
            scripts.push_back(scenario::build_scenario(inputs.back(), cfg));
        }
        auto total = [n](const std::optional<double>& mean) {
            return mean ? static_cast<std::int64_t>(std::llround(*mean * n)) : std::int64_t{-1};
        };
        calibrate_tokens(scripts, total(it->prompt_tokens), total(it->completion_tokens));
        // calibrated replies stay as they are; reduced configurations get theirs unscaled
        for (int s = 0; s < n; ++s) {
            scenario::cover_reduced_configs(scripts[static_cast<std::size_t>(s)], inputs[static_cast<std::size_t>(s)],
                                            cfg);
        }
        for (int s = 0; s < n; ++s) {
            const auto path = scenario_path(dir, task.id, s);
            std::filesystem::create_directories(path.parent_path());
            scenario::save_scenario(scripts[static_cast<std::size_t>(s)], path);
            ++written;
        }
    }
    return written;
}

}  // namespace cotflow::bench
