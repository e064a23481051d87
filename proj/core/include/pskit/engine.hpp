#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pskit/compiler.hpp"
#include "pskit/diagnostics.hpp"
#include "pskit/hash.hpp"

namespace pskit {

/// Canonical action order; the solver expands in this order.
enum class Action : uint8_t { up, down, left, right, act };
inline constexpr Action kAllActions[] = {Action::up, Action::down, Action::left, Action::right, Action::act};
char action_letter(Action a);
std::optional<Action> action_from_letter(char c);
std::string action_letters(const std::vector<Action>& actions);
std::optional<std::vector<Action>> actions_from_letters(std::string_view text);

/// Per-slot motion tag used while a turn is in flight.
enum class MotionVal : uint8_t { none = 0, up, down, left, right, action };

/// Snapshot of one level in play. Between turns `motions` is empty, which
/// means "all none"; step() materializes it while rules run. Copyable and
/// sendable across threads.
struct GameState {
    int width = 0, height = 0, layers = 0;
    std::vector<ObjectId> grid;     // (y*width+x)*layers + layer
    std::vector<uint8_t> motions;   // MotionVal per slot; empty between turns
    int level_index = 0;
    std::optional<std::vector<ObjectId>> checkpoint;
    uint64_t rng_seed = 0;
    enum class Status : uint8_t { in_progress, won } status = Status::in_progress;

    ObjectId& at(int x, int y, int layer) { return grid[(static_cast<size_t>(y) * width + x) * layers + layer]; }
    ObjectId at(int x, int y, int layer) const { return grid[(static_cast<size_t>(y) * width + x) * layers + layer]; }
};

enum class EventKind { won, cancelled, message, checkpoint_set, restarted, again_ran };

struct Event {
    EventKind kind;
    std::string text;  // message payload
    int count = 0;     // again repetitions
};

struct TurnOutcome {
    GameState state;
    bool changed = false;  // any grid cell differs from the pre-turn state
    std::vector<Event> events;
    std::optional<Diagnostic> error;  // RULE_LOOP_DETECTED when a cap tripped
};

/// Builds the initial state of a grid level (implicit Background fill). If
/// the game sets run_rules_on_level_start, one input-free rule pass runs,
/// including the win check. Throws std::out_of_range for a bad index and
/// std::invalid_argument for a message level.
GameState init_state(const CompiledGame& game, int level_index);

/// Executes one full turn. Requires state.status == in_progress (throws
/// std::logic_error otherwise). Deterministic for fixed inputs and seed.
TurnOutcome step(const CompiledGame& game, const GameState& state, Action action);

/// Movement commit loop, exposed for tests: commits pending moves whose
/// destination slot is free, sweeping in row-major order until fixpoint,
/// then clears whatever could not move.
void resolve_movement(GameState& state);

bool check_win(const CompiledGame& game, const GameState& state);

/// Digest over (dimensions, grid, status); motions and rng seed excluded.
/// Stable across processes and platforms.
Digest hash_state(const GameState& state);

/// Re-encodes a state as level glyphs via the game's glyph table; cells
/// whose object set has no unique glyph come back as '?'. Test helper.
std::vector<std::string> encode_level(const CompiledGame& game, const GameState& state);

namespace engine_limits {
inline constexpr int kMaxRuleApplicationsPerPhase = 10'000;
inline constexpr int kMaxAgainRepetitions = 200;
}  // namespace engine_limits

}  // namespace pskit
