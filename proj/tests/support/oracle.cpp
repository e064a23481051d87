#include "oracle.hpp"

#include <cstring>
#include <map>
#include <string>
#include <vector>

namespace pskit::testing {
namespace {

std::string state_key(const GameState& s) {
    std::string key;
    key.resize(s.grid.size() * sizeof(ObjectId) + 1);
    std::memcpy(key.data(), s.grid.data(), s.grid.size() * sizeof(ObjectId));
    key.back() = s.status == GameState::Status::won ? 'W' : 'p';
    return key;
}

struct Iddfs {
    const CompiledGame& game;
    std::map<std::string, int> seen;  // key -> remaining depth it was explored with
    bool frontier_cut = false;        // some branch stopped at the depth limit

    bool dfs(const GameState& s, int remaining) {
        if (s.status == GameState::Status::won) return true;
        if (remaining == 0) {
            frontier_cut = true;
            return false;
        }
        std::string key = state_key(s);
        auto it = seen.find(key);
        if (it != seen.end() && it->second >= remaining) return false;
        seen[key] = remaining;

        for (Action a : kAllActions) {
            TurnOutcome out = step(game, s, a);
            if (out.error) continue;
            if (!out.changed && out.events.empty()) continue;
            if (dfs(out.state, remaining - 1)) return true;
        }
        return false;
    }
};

}  // namespace

OracleResult oracle_solve(const CompiledGame& game, int level_index, int max_depth) {
    OracleResult result;
    GameState initial = init_state(game, level_index);
    for (int depth = 0; depth <= max_depth; ++depth) {
        Iddfs walker{game};
        if (walker.dfs(initial, depth)) {
            result.solvable = true;
            result.length = depth;
            return result;
        }
        if (!walker.frontier_cut) {
            result.exhausted = true;  // nothing new below this depth
            return result;
        }
    }
    return result;
}

uint64_t oracle_reachable_states(const CompiledGame& game, int level_index, uint64_t cap) {
    GameState initial = init_state(game, level_index);
    std::map<std::string, bool> seen;
    std::vector<GameState> stack;
    seen.emplace(state_key(initial), true);
    stack.push_back(std::move(initial));

    while (!stack.empty() && seen.size() < cap) {
        GameState s = std::move(stack.back());
        stack.pop_back();
        if (s.status == GameState::Status::won) continue;
        for (Action a : kAllActions) {
            TurnOutcome out = step(game, s, a);
            if (out.error) continue;
            if (!out.changed && out.events.empty()) continue;
            if (seen.emplace(state_key(out.state), true).second) stack.push_back(std::move(out.state));
        }
    }
    return seen.size();
}

}  // namespace pskit::testing
