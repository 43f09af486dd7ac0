// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/bench/ablation.hpp"

#include "cotflow/util.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

namespace cotflow::bench {

std::vector<GridPoint> parse_grid(std::string_view text) {
    std::vector<GridPoint> out;
    std::set<GridPoint> seen;
    for (const auto& raw : split(text, ',')) {
        const std::string_view item = trim(raw);
        const auto colon = item.find(':');
        auto level = [&](std::string_view s, int max) {
            s = trim(s);
            int v = -1;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size() || v < 0 || v > max) {
                throw Error(ErrorCode::ConfigError, "bad grid level '" + std::string(s) + "' in '" + std::string(item) +
                                                        "'");
            }
            return v;
        };
        if (colon == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError, "grid point '" + std::string(item) + "' is not qdcot:icot");
        }
        const GridPoint pt{level(item.substr(0, colon), 2), level(item.substr(colon + 1), 3)};
        if (!seen.insert(pt).second) {
            throw Error(ErrorCode::ConfigError, "duplicate grid point '" + std::string(item) + "'");
        }
        out.push_back(pt);
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, "empty ablation grid");
    return out;
}

std::vector<GridPoint> default_grid() { return {{2, 0}, {2, 1}, {2, 2}, {2, 3}, {0, 3}, {1, 3}}; }

namespace {

std::string point_dir(const GridPoint& p) { return "q" + std::to_string(p.qdcot) + "i" + std::to_string(p.icot); }

SweepFit make_sweep(const std::vector<AblationPoint>& points, bool over_qdcot) {
    SweepFit sweep;
    sweep.label = over_qdcot ? "qdcot" : "icot";
    int fixed = -1;
    for (const auto& p : points) fixed = std::max(fixed, over_qdcot ? p.point.icot : p.point.qdcot);
    std::vector<const AblationPoint*> members;
    for (const auto& p : points) {
        if ((over_qdcot ? p.point.icot : p.point.qdcot) == fixed) members.push_back(&p);
    }
    auto level = [&](const AblationPoint* p) { return over_qdcot ? p->point.qdcot : p->point.icot; };
    std::sort(members.begin(), members.end(), [&](auto* x, auto* y) { return level(x) < level(y); });
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < members.size(); ++i) {
        sweep.points.push_back(members[i]->point);
        if (i > 0 && members[i]->executability < members[i - 1]->executability) sweep.nondecreasing = false;
        const double t = over_qdcot ? members[i]->non_iteration_tokens : members[i]->iteration_tokens;
        if (t > 0.0) xy.emplace_back(t, members[i]->executability);
    }
    if (members.size() < 2) {
        sweep.note = "fewer than two levels";
        return sweep;
    }
    try {
        sweep.fit = metrics::fit_scaling(xy, over_qdcot ? metrics::ScalingAxis::NonIterationTokens
                                                        : metrics::ScalingAxis::IterationTokens);
    } catch (const Error& e) {
        sweep.note = e.what();
    }
    return sweep;
}

}  // namespace

AblationReport run_ablation(const std::vector<BenchTask>& tasks, const std::vector<GridPoint>& grid,
                            const BenchOptions& base, const BenchEnv& env) {
    if (grid.empty()) throw Error(ErrorCode::ConfigError, "empty ablation grid");
    AblationReport report;
    for (const auto& g : grid) {
        BenchOptions opt = base;
        opt.cfg.qdcot_level = g.qdcot;
        opt.cfg.icot_level = g.icot;
        opt.out_dir = base.out_dir / "ablation" / point_dir(g);
        AblationPoint pt;
        pt.point = g;
        pt.results = run_benchmark(tasks, opt, env);
        for (const auto& r : pt.results) {
            pt.executability += r.executability;
            pt.pass_at_k += r.pass_at_k;
            pt.non_iteration_tokens += r.non_iteration_tokens;
            pt.iteration_tokens += r.iteration_tokens;
            pt.cost += r.cost;
        }
        const double n = static_cast<double>(pt.results.size());
        pt.executability /= n;
        pt.pass_at_k /= n;
        pt.non_iteration_tokens /= n;
        pt.iteration_tokens /= n;
        pt.cost /= n;
        report.points.push_back(std::move(pt));
    }
    for (bool over_qdcot : {true, false}) {
        auto s = make_sweep(report.points, over_qdcot);
        if (s.points.size() >= 2) report.sweeps.push_back(std::move(s));
    }
    return report;
}

std::string ablation_points_csv(const AblationReport& report) {
    std::string out = "qdcot,icot,executability,pass_at_k,non_iteration_tokens,iteration_tokens,total_tokens,cost\n";
    for (const auto& p : report.points) {
        out += std::to_string(p.point.qdcot) + "," + std::to_string(p.point.icot) + "," +
               format_fixed(p.executability, 6) + "," + format_fixed(p.pass_at_k, 6) + "," +
               format_fixed(p.non_iteration_tokens, 6) + "," + format_fixed(p.iteration_tokens, 6) + "," +
               format_fixed(p.total_tokens(), 6) + "," + format_fixed(p.cost, 6) + "\n";
    }
    return out;
}

std::string render_ablation(const AblationReport& report, const BenchOptions& base) {
    std::string out = "cotflow ablation report\n";
    out += "mode: " + std::string(to_string(base.mode)) + "  samples per task: " + std::to_string(base.n) +
           "  k: " + std::to_string(base.k) + "  max iterations: " + std::to_string(base.cfg.max_iterations) + "\n\n";
    out += "qdcot  icot  executability  pass@" + std::to_string(base.k) +
           " (%)  non-iteration tokens  iteration tokens  cost\n";
    for (const auto& p : report.points) {
        char line[160];
        std::snprintf(line, sizeof line, "%5d  %4d  %13.2f  %10.1f  %20.1f  %16.1f  %.4f\n", p.point.qdcot,
                      p.point.icot, p.executability, 100.0 * p.pass_at_k, p.non_iteration_tokens, p.iteration_tokens,
                      p.cost);
        out += line;
    }
    for (const auto& s : report.sweeps) {
        out += "\n" + s.label + " sweep:";
        for (const auto& g : s.points) out += " (" + std::to_string(g.qdcot) + "," + std::to_string(g.icot) + ")";
        out += "\n  executability " + std::string(s.nondecreasing ? "nondecreasing" : "DECREASES") + " with level\n";
        if (s.fit) {
            out += "  fit over " + std::string(metrics::to_string(s.fit->axis)) + ": executability = " +
                   format_fixed(s.fit->a, 4) + " + " + format_fixed(s.fit->b, 4) + " ln(tokens), r2 = " +
                   format_fixed(s.fit->r2, 4) + ", points = " + std::to_string(s.fit->points) +
                   (s.fit->b >= 0.0 ? ", monotone\n" : ", not monotone\n");
        } else {
            out += "  no fit: " + s.note + "\n";
        }
    }
    return out;
}

std::filesystem::path write_ablation(const AblationReport& report, const BenchOptions& base,
                                     const std::filesystem::path& dir) {
    const auto path = dir / "ablation.txt";
    write_text_file(path, render_ablation(report, base));
    write_text_file(dir / "ablation_points.csv", ablation_points_csv(report));
    return path;
}

}  // namespace cotflow::bench
