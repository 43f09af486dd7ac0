// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/metrics/results_table.hpp"

#include "cotflow/common.hpp"
#include "cotflow/util.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

namespace cotflow::metrics {

namespace {

std::vector<std::string> split_csv_line(std::string_view line, const std::string& where) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::string(trim(cell)));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted) throw Error(ErrorCode::SchemaError, where + ": unterminated quote");
    out.push_back(std::string(trim(cell)));
    return out;
}

double to_number(const std::string& text, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v)) {
        throw Error(ErrorCode::SchemaError, where + ": '" + text + "' is not a number");
    }
    return v;
}

void check(std::vector<Finding>& out, std::string check, std::string row, double expected, double actual,
           double tolerance) {
    if (std::fabs(expected - actual) > tolerance) {
        out.push_back(Finding{std::move(check), std::move(row), expected, actual, tolerance});
    }
}

std::optional<double> optional_sum(const std::optional<double>& a, const std::optional<double>& b) {
    if (!a || !b) return std::nullopt;
    return *a + *b;
}

}  // namespace

ResultsTable parse_results_csv(std::string_view text) {
    const auto lines = split(text, '\n');
    std::map<std::string, std::size_t> col;
    ResultsTable table;
    bool have_header = false;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto line = trim(lines[ln]);
        if (line.empty() || line.front() == '#') continue;
        const std::string where = "line " + std::to_string(ln + 1);
        auto cells = split_csv_line(line, where);
        if (!have_header) {
            for (std::size_t i = 0; i < cells.size(); ++i) col[cells[i]] = i;
            for (const char* req : {"task_id", "executability", "tokens", "iterations", "pass_at_1"}) {
                if (!col.contains(req)) {
                    throw Error(ErrorCode::SchemaError, where + ": header lacks column '" + req + "'");
                }
            }
            have_header = true;
            continue;
        }
        if (cells.size() != col.size()) {
            throw Error(ErrorCode::SchemaError, where + ": expected " + std::to_string(col.size()) + " cells, got " +
                                                    std::to_string(cells.size()));
        }
        auto text_of = [&](const char* name) { return col.contains(name) ? cells[col[name]] : std::string(); };
        auto num = [&](const char* name) { return to_number(cells[col.at(name)], where + " " + name); };
        auto opt = [&](const char* name) -> std::optional<double> {
            if (!col.contains(name) || cells[col[name]].empty()) return std::nullopt;
            return to_number(cells[col[name]], where + " " + name);
        };
        TaskRow row{text_of("task_id"),
                    text_of("sim_case"),
                    text_of("post_task"),
                    num("executability"),
                    num("tokens"),
                    num("iterations"),
                    num("pass_at_1"),
                    opt("sim_iterations"),
                    opt("post_iterations"),
                    opt("script_iterations"),
                    opt("prompt_tokens"),
                    opt("completion_tokens")};
        if (row.task_id.empty()) throw Error(ErrorCode::SchemaError, where + ": empty task_id");
        if (row.task_id == "Average") {
            if (table.reported_average) throw Error(ErrorCode::SchemaError, where + ": second Average row");
            table.reported_average = std::move(row);
        } else {
            table.rows.push_back(std::move(row));
        }
    }
    if (!have_header) throw Error(ErrorCode::SchemaError, "results table has no header");
    return table;
}

ResultsTable load_results_csv(const std::filesystem::path& path) {
    try {
        return parse_results_csv(read_text_file(path));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SchemaError) throw;
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
}

TaskRow column_means(const ResultsTable& table) {
    if (table.rows.empty()) throw Error(ErrorCode::EmptyInput, "results table has no rows");
    const double n = static_cast<double>(table.rows.size());
    TaskRow m;
    m.task_id = "mean";
    auto mean_opt = [&](std::optional<double> TaskRow::*field) -> std::optional<double> {
        double sum = 0.0;
        for (const auto& r : table.rows) {
            if (!(r.*field)) return std::nullopt;
            sum += *(r.*field);
        }
        return sum / n;
    };
    for (const auto& r : table.rows) {
        m.executability += r.executability;
        m.tokens += r.tokens;
        m.iterations += r.iterations;
        m.pass_at_1 += r.pass_at_1;
    }
    m.executability /= n;
    m.tokens /= n;
    m.iterations /= n;
    m.pass_at_1 /= n;
    m.sim_iterations = mean_opt(&TaskRow::sim_iterations);
    m.post_iterations = mean_opt(&TaskRow::post_iterations);
    m.script_iterations = mean_opt(&TaskRow::script_iterations);
    m.prompt_tokens = mean_opt(&TaskRow::prompt_tokens);
    m.completion_tokens = mean_opt(&TaskRow::completion_tokens);
    return m;
}

std::string Finding::describe() const {
    return check + " [" + row + "]: expected " + format_fixed(expected, 4) + ", got " + format_fixed(actual, 4) +
           " (tolerance " + format_fixed(tolerance, 4) + ")";
}

std::vector<Finding> cross_check(const ResultsTable& table, const CrossCheckTolerances& tol) {
    std::vector<Finding> out;
    const TaskRow mean = column_means(table);

    if (const auto& avg = table.reported_average) {
        check(out, "mean executability", "Average", avg->executability, mean.executability, tol.executability);
        check(out, "mean pass@1", "Average", avg->pass_at_1, mean.pass_at_1, tol.pass_at_1);
        check(out, "mean tokens", "Average", avg->tokens, mean.tokens, tol.tokens);
        check(out, "mean iterations", "Average", avg->iterations, mean.iterations, tol.iterations);
        auto opt_check = [&](const char* name, const std::optional<double>& reported,
                             const std::optional<double>& computed, double t) {
            if (reported && computed) check(out, name, "Average", *reported, *computed, t);
        };
        opt_check("mean simulation iterations", avg->sim_iterations, mean.sim_iterations, tol.category_iterations);
        opt_check("mean postprocessing iterations", avg->post_iterations, mean.post_iterations,
                  tol.category_iterations);
        opt_check("mean script iterations", avg->script_iterations, mean.script_iterations, tol.category_iterations);
        opt_check("mean prompt tokens", avg->prompt_tokens, mean.prompt_tokens, tol.direction_tokens);
        opt_check("mean completion tokens", avg->completion_tokens, mean.completion_tokens, tol.direction_tokens);
    }

    // Identities on the averages, preferring the reported figures.
    const TaskRow& basis = table.reported_average ? *table.reported_average : mean;
    auto pick = [&](std::optional<double> TaskRow::*field) {
        return basis.*field ? basis.*field : mean.*field;
    };
    if (auto sum = optional_sum(pick(&TaskRow::prompt_tokens), pick(&TaskRow::completion_tokens))) {
        check(out, "tokens = prompt + completion", basis.task_id, basis.tokens, *sum, tol.tokens);
    }
    const auto sim = pick(&TaskRow::sim_iterations);
    const auto post = pick(&TaskRow::post_iterations);
    const auto script = pick(&TaskRow::script_iterations);
    if (sim && post && script) {
        check(out, "iterations = sum of categories", basis.task_id, basis.iterations, *sim + *post + *script,
              tol.iterations);
    }

    if (tol.per_row) {
        for (const auto& r : table.rows) {
            if (auto sum = optional_sum(r.prompt_tokens, r.completion_tokens)) {
                check(out, "tokens = prompt + completion", r.task_id, r.tokens, *sum, tol.tokens);
            }
            if (r.sim_iterations && r.post_iterations && r.script_iterations) {
                check(out, "iterations = sum of categories", r.task_id, r.iterations,
                      *r.sim_iterations + *r.post_iterations + *r.script_iterations, tol.iterations);
            }
        }
    }
    return out;
}

}  // namespace cotflow::metrics
