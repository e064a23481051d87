#pragma once

#include <cstdint>

#include "pskit/compiler.hpp"
#include "pskit/engine.hpp"

namespace pskit::testing {

struct OracleResult {
    bool solvable = false;
    int length = -1;  // minimal solution length when solvable
    bool exhausted = false;  // full space enumerated without a win
};

/// Iterative-deepening DFS over step(), with exact-byte state keys for
/// transposition pruning. Independent of the solver's BFS and of the
/// 128-bit state digest it deduplicates with.
OracleResult oracle_solve(const CompiledGame& game, int level_index, int max_depth = 64);

/// Exact count of unique reachable states (initial state included),
/// counting only turns that change the grid or raise events.
uint64_t oracle_reachable_states(const CompiledGame& game, int level_index,
                                 uint64_t cap = 10'000'000);

}  // namespace pskit::testing
