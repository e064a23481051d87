#include "pskit/solver.hpp"

#include <chrono>
#include <deque>
#include <unordered_set>

namespace pskit {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::solved: return "solved";
        case SolveStatus::exhausted: return "exhausted";
        case SolveStatus::budget_exceeded: return "budget_exceeded";
        case SolveStatus::nondeterministic: return "nondeterministic";
        case SolveStatus::engine_error: return "engine_error";
        case SolveStatus::skipped_message: return "message";
    }
    return "?";
}

namespace {

struct Node {
    int32_t parent;
    Action action;
};

}  // namespace

SolveResult bfs_solve(const CompiledGame& game, int level_index, const SolverConfig& config) {
    SolveResult result;
    if (game.has_random_rules) {
        result.status = SolveStatus::nondeterministic;
        return result;
    }

    GameState initial = init_state(game, level_index);

    std::unordered_set<Digest, DigestHasher> visited;
    visited.reserve(static_cast<size_t>(std::min<uint64_t>(config.node_budget, 1u << 21)));
    std::vector<Node> arena;  // parent links for path reconstruction
    std::deque<std::pair<int32_t, GameState>> frontier;

    visited.insert(hash_state(initial));
    arena.push_back(Node{-1, Action::up});
    frontier.emplace_back(0, std::move(initial));
    result.enqueued = 1;

    const auto start_time = std::chrono::steady_clock::now();
    auto time_exceeded = [&]() {
        if (!config.per_level_time_budget) return false;
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time;
        return elapsed.count() > *config.per_level_time_budget;
    };

    while (!frontier.empty()) {
        if (result.nodes_explored >= config.node_budget) {
            result.status = SolveStatus::budget_exceeded;
            return result;
        }
        if ((result.nodes_explored & 1023) == 0 && time_exceeded()) {
            result.status = SolveStatus::budget_exceeded;
            return result;
        }

        auto [node_index, state] = std::move(frontier.front());
        frontier.pop_front();
        ++result.nodes_explored;

        if (state.status == GameState::Status::won) {
            // reconstruct the action path root -> here
            std::vector<Action> path;
            for (int32_t i = node_index; i > 0; i = arena[i].parent) path.push_back(arena[i].action);
            result.solution.assign(path.rbegin(), path.rend());
            result.solution_length = static_cast<int>(result.solution.size());
            result.status = SolveStatus::solved;
            return result;
        }

        for (Action a : kAllActions) {
            TurnOutcome outcome = step(game, state, a);
            if (outcome.error) {
                result.status = SolveStatus::engine_error;
                return result;
            }
            if (!outcome.changed && outcome.events.empty()) continue;
            Digest d = hash_state(outcome.state);
            if (!visited.insert(d).second) continue;
            arena.push_back(Node{node_index, a});
            frontier.emplace_back(static_cast<int32_t>(arena.size() - 1), std::move(outcome.state));
            ++result.enqueued;
        }
    }

    result.status = SolveStatus::exhausted;
    return result;
}

std::vector<SolveResult> solve_all_levels(const CompiledGame& game, const SolverConfig& config) {
    std::vector<SolveResult> results;
    results.reserve(game.levels.size());
    for (size_t i = 0; i < game.levels.size(); ++i) {
        if (game.levels[i].is_message) {
            SolveResult marker;
            marker.status = SolveStatus::skipped_message;
            results.push_back(std::move(marker));
        } else {
            results.push_back(bfs_solve(game, static_cast<int>(i), config));
        }
    }
    return results;
}

std::string solve_result_line(int level_index, const SolveResult& r) {
    std::string line = "level " + std::to_string(level_index) + ": ";
    if (r.status == SolveStatus::skipped_message) {
        line += "message (skipped)";
        return line;
    }
    line += solve_status_name(r.status);
    line += ", length " + std::to_string(r.solution_length);
    line += ", nodes " + std::to_string(r.nodes_explored);
    return line;
}

}  // namespace pskit
