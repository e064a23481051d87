#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pskit/solver.hpp"
#include "pskit/source.hpp"

namespace pskit {

/// Minimum solution lengths (strict >) behind the two solvability metrics.
struct EvalThresholds {
    int any_solvable_min_length = 1;
    int all_solvable_min_length = 10;
};

struct GameEvalReport {
    bool compiles = false;
    std::vector<SolveResult> per_level;  // message markers included
    bool any_solvable = false;
    bool all_solvable = false;  // requires at least one grid level
    uint64_t complexity = 0;    // sum of nodes_explored over solved levels
};

/// Full pipeline evaluation of one source text: parse, compile, solve each
/// level, apply thresholds. Malformed source yields all-false with
/// complexity 0.
GameEvalReport evaluate_game(const SourceText& source, const EvalThresholds& thresholds = {},
                             const SolverConfig& solver_config = {});

/// Applies the thresholds to already-computed per-level results.
GameEvalReport eval_from_levels(std::vector<SolveResult> per_level, const EvalThresholds& thresholds);

/// What aggregation needs from one finished trial.
struct TrialSummary {
    bool fewshot = false;
    bool chain_of_thought = false;
    bool brainstorm = false;
    int context_budget = 0;
    std::string model;
    std::string outcome;  // success | failed_max_iterations | backend_error
    int iterations = 0;
    GameEvalReport final_eval;
};

struct SummaryRow {
    std::string key;
    int trials = 0;
    int compiles_pct = 0;
    int any_solvable_pct = 0;
    int all_solvable_pct = 0;
    long long complexity_mean = 0;
    long long complexity_std = 0;  // population std, rounded half-up
};

struct SummaryTable {
    std::string group_key;
    std::vector<SummaryRow> rows;
};

/// Groups trials by a comma-separated key over {fewshot, cot, brainstorm,
/// context, model, none}; percentages are over all trials in the row,
/// rounded to whole percent; unsolved games contribute complexity 0.
SummaryTable aggregate(const std::vector<TrialSummary>& trials, const std::string& group_key);

std::string render_table_text(const SummaryTable& table);
std::string render_table_csv(const SummaryTable& table);

}  // namespace pskit
