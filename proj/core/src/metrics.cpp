#include "pskit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pskit/compiler.hpp"
#include "pskit/parser.hpp"

namespace pskit {

GameEvalReport eval_from_levels(std::vector<SolveResult> per_level, const EvalThresholds& thresholds) {
    GameEvalReport report;
    report.compiles = true;
    report.per_level = std::move(per_level);

    int grid_levels = 0;
    int solved_above_all = 0;
    for (const SolveResult& r : report.per_level) {
        if (r.status == SolveStatus::skipped_message) continue;
        ++grid_levels;
        if (r.status == SolveStatus::solved) {
            if (r.solution_length > thresholds.any_solvable_min_length) report.any_solvable = true;
            if (r.solution_length > thresholds.all_solvable_min_length) ++solved_above_all;
            report.complexity += r.nodes_explored;
        }
    }
    report.all_solvable = grid_levels > 0 && solved_above_all == grid_levels;
    return report;
}

GameEvalReport evaluate_game(const SourceText& source, const EvalThresholds& thresholds,
                             const SolverConfig& solver_config) {
    ParseResult parsed = parse_game(source);
    if (!parsed.spec) return {};
    CompileResult compiled = compile(*parsed.spec);
    if (!compiled.game) return {};
    return eval_from_levels(solve_all_levels(*compiled.game, solver_config), thresholds);
}

namespace {

long long round_half_up(double v) { return static_cast<long long>(std::floor(v + 0.5)); }

std::string group_value(const TrialSummary& t, const std::string& field) {
    if (field == "fewshot") return t.fewshot ? "T" : "F";
    if (field == "cot") return t.chain_of_thought ? "T" : "F";
    if (field == "brainstorm") return t.brainstorm ? "T" : "F";
    if (field == "context") return std::to_string(t.context_budget);
    if (field == "model") return t.model;
    return "all";
}

std::vector<std::string> split_key(const std::string& key) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : key) {
        if (c == ',') {
            if (!cur.empty()) fields.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) fields.push_back(cur);
    return fields;
}

}  // namespace

SummaryTable aggregate(const std::vector<TrialSummary>& trials, const std::string& group_key) {
    SummaryTable table;
    table.group_key = group_key.empty() ? "all" : group_key;
    auto fields = split_key(table.group_key);

    std::map<std::string, std::vector<const TrialSummary*>> groups;
    std::vector<std::string> order;
    for (const auto& t : trials) {
        std::string key;
        for (const auto& f : fields) {
            if (!key.empty()) key += '/';
            key += group_value(t, f);
        }
        if (key.empty()) key = "all";
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&t);
    }
    std::sort(order.begin(), order.end());

    for (const auto& key : order) {
        const auto& members = groups[key];
        SummaryRow row;
        row.key = key;
        row.trials = static_cast<int>(members.size());
        int compiles = 0, any = 0, all = 0;
        double sum = 0;
        for (const auto* t : members) {
            compiles += t->final_eval.compiles ? 1 : 0;
            any += t->final_eval.any_solvable ? 1 : 0;
            all += t->final_eval.all_solvable ? 1 : 0;
            sum += static_cast<double>(t->final_eval.complexity);
        }
        double n = static_cast<double>(row.trials);
        row.compiles_pct = static_cast<int>(round_half_up(100.0 * compiles / n));
        row.any_solvable_pct = static_cast<int>(round_half_up(100.0 * any / n));
        row.all_solvable_pct = static_cast<int>(round_half_up(100.0 * all / n));
        double mean = sum / n;
        double variance = 0;
        for (const auto* t : members) {
            double d = static_cast<double>(t->final_eval.complexity) - mean;
            variance += d * d;
        }
        variance /= n;  // population variance
        row.complexity_mean = round_half_up(mean);
        row.complexity_std = round_half_up(std::sqrt(variance));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render_table_text(const SummaryTable& table) {
    std::vector<std::array<std::string, 6>> cells;
    cells.push_back({table.group_key, "Trials", "Compiles", "Any Solvable", "All Solvable",
                     "Sol. Complexity"});
    for (const auto& r : table.rows) {
        cells.push_back({r.key, std::to_string(r.trials), std::to_string(r.compiles_pct) + "%",
                         std::to_string(r.any_solvable_pct) + "%",
                         std::to_string(r.all_solvable_pct) + "%",
                         std::to_string(r.complexity_mean) + " \xC2\xB1 " +
                             std::to_string(r.complexity_std)});
    }
    std::array<size_t, 6> widths{};
    for (const auto& row : cells)
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());

    std::ostringstream os;
    for (size_t r = 0; r < cells.size(); ++r) {
        for (size_t i = 0; i < cells[r].size(); ++i) {
            os << cells[r][i];
            if (i + 1 < cells[r].size())
                os << std::string(widths[i] - cells[r][i].size() + 2, ' ');
        }
        os << '\n';
        if (r == 0) {
            size_t total = 0;
            for (size_t i = 0; i < widths.size(); ++i) total += widths[i] + (i + 1 < widths.size() ? 2 : 0);
            os << std::string(total, '-') << '\n';
        }
    }
    return os.str();
}

std::string render_table_csv(const SummaryTable& table) {
    std::ostringstream os;
    os << "group,trials,compiles_pct,any_solvable_pct,all_solvable_pct,complexity_mean,complexity_std\n";
    for (const auto& r : table.rows) {
        std::string key = r.key;
        bool quote = key.find(',') != std::string::npos || key.find('"') != std::string::npos;
        if (quote) {
            std::string escaped = "\"";
            for (char c : key) {
                if (c == '"') escaped += "\"\"";
                else escaped += c;
            }
            escaped += '"';
            key = escaped;
        }
        os << key << ',' << r.trials << ',' << r.compiles_pct << ',' << r.any_solvable_pct << ','
           << r.all_solvable_pct << ',' << r.complexity_mean << ',' << r.complexity_std << '\n';
    }
    return os.str();
}

}  // namespace pskit
