#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pskit/compiler.hpp"
#include "pskit/engine.hpp"

namespace pskit {

struct SolverConfig {
    uint64_t node_budget = 1'000'000;  // unique states expanded
    std::optional<double> per_level_time_budget;  // wall-clock seconds
};

enum class SolveStatus {
    solved,
    exhausted,         // full reachable space enumerated, no win
    budget_exceeded,
    nondeterministic,  // game has random rules; BFS declines
    engine_error,      // a step raised a runtime diagnostic
    skipped_message,   // marker for message entries in solve_all_levels
};
const char* solve_status_name(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::exhausted;
    std::vector<Action> solution;  // empty unless solved
    int solution_length = 0;
    uint64_t nodes_explored = 0;  // unique states popped
    uint64_t enqueued = 0;        // total states pushed, initial included

    bool operator==(const SolveResult&) const = default;
};

/// Breadth-first search from the level's initial state, expanding actions
/// in canonical order (Up, Down, Left, Right, Act). A state is new iff its
/// 128-bit digest is unseen; no-change, no-event turns are not enqueued.
/// The first win popped gives a minimal-length solution. Deterministic.
SolveResult bfs_solve(const CompiledGame& game, int level_index, const SolverConfig& config = {});

/// One result per level entry in order; message entries yield the
/// skipped_message marker. Budgets are per level.
std::vector<SolveResult> solve_all_levels(const CompiledGame& game, const SolverConfig& config = {});

/// `level N: status, length L, nodes K` — the line format embedded in trial
/// feedback and CLI output.
std::string solve_result_line(int level_index, const SolveResult& r);

}  // namespace pskit
