#include "pskit/engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace pskit {

char action_letter(Action a) {
    switch (a) {
        case Action::up: return 'U';
        case Action::down: return 'D';
        case Action::left: return 'L';
        case Action::right: return 'R';
        case Action::act: return 'X';
    }
    return '?';
}

std::optional<Action> action_from_letter(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'U': return Action::up;
        case 'D': return Action::down;
        case 'L': return Action::left;
        case 'R': return Action::right;
        case 'X': return Action::act;
        default: return std::nullopt;
    }
}

std::string action_letters(const std::vector<Action>& actions) {
    std::string out;
    out.reserve(actions.size());
    for (Action a : actions) out.push_back(action_letter(a));
    return out;
}

std::optional<std::vector<Action>> actions_from_letters(std::string_view text) {
    std::vector<Action> out;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        auto a = action_from_letter(c);
        if (!a) return std::nullopt;
        out.push_back(*a);
    }
    return out;
}

namespace {

constexpr int kMaxEllipses = 8;

inline MotionVal motion_of_dir(AbsDir d) {
    switch (d) {
        case AbsDir::up: return MotionVal::up;
        case AbsDir::down: return MotionVal::down;
        case AbsDir::left: return MotionVal::left;
        case AbsDir::right: return MotionVal::right;
    }
    return MotionVal::none;
}

inline bool motion_matches(RunMotion want, MotionVal have) {
    switch (want) {
        case RunMotion::any: return true;
        case RunMotion::none: return have == MotionVal::none;
        case RunMotion::up: return have == MotionVal::up;
        case RunMotion::down: return have == MotionVal::down;
        case RunMotion::left: return have == MotionVal::left;
        case RunMotion::right: return have == MotionVal::right;
        case RunMotion::action: return have == MotionVal::action;
        case RunMotion::moving: return have != MotionVal::none;
    }
    return false;
}

struct MatchPos {
    int x = 0, y = 0;
    std::array<int, kMaxEllipses> spans{};
};

/// Matched-object record per (cell, atom) of one bracket match; used by the
/// rewriter to bind property identity and `moving` motions.
struct CellBinding {
    std::array<ObjectId, 8> object{};
    std::array<MotionVal, 8> motion{};
};

class Engine {
public:
    Engine(const CompiledGame& game, GameState& state) : g_(game), s_(state) {}

    size_t slot_index(int x, int y, int layer) const {
        return (static_cast<size_t>(y) * s_.width + x) * s_.layers + layer;
    }

    // ---- matching ----

    bool atom_matches(const CompiledAtom& atom, int x, int y, ObjectId* matched,
                      MotionVal* matched_motion) const {
        ObjectId found = kNoObject;
        MotionVal found_motion = MotionVal::none;
        for (ObjectId id : atom.members) {
            int layer = g_.objects[id - 1].layer;
            if (layer < 0) continue;
            size_t idx = slot_index(x, y, layer);
            if (s_.grid[idx] == id && motion_matches(atom.motion, static_cast<MotionVal>(s_.motions[idx]))) {
                found = id;
                found_motion = static_cast<MotionVal>(s_.motions[idx]);
                break;
            }
        }
        if (atom.negated) return found == kNoObject;
        if (found == kNoObject) return false;
        if (matched) *matched = found;
        if (matched_motion) *matched_motion = found_motion;
        return true;
    }

    bool cell_matches(const CompiledCell& cell, int x, int y, CellBinding* binding) const {
        for (size_t a = 0; a < cell.atoms.size(); ++a) {
            ObjectId obj = kNoObject;
            MotionVal mv = MotionVal::none;
            if (!atom_matches(cell.atoms[a], x, y, &obj, &mv)) return false;
            if (binding && a < binding->object.size()) {
                binding->object[a] = obj;
                binding->motion[a] = mv;
            }
        }
        return true;
    }

    int max_steps_from(int x, int y, AbsDir dir) const {
        switch (dir) {
            case AbsDir::up: return y;
            case AbsDir::down: return s_.height - 1 - y;
            case AbsDir::left: return x;
            case AbsDir::right: return s_.width - 1 - x;
        }
        return 0;
    }

    /// Shortest-span-first ellipsis matching from a fixed anchor.
    bool match_bracket_at(const CompiledBracket& bracket, AbsDir dir, int x0, int y0,
                          MatchPos& pos, std::vector<CellBinding>* bindings) const {
        int dx = dir_dx(dir), dy = dir_dy(dir);
        int limit = max_steps_from(x0, y0, dir);

        struct Frame {
            size_t cell = 0;
            size_t ell = 0;
            int offset = 0;
        };
        // recursive lambda over (cell index, ellipsis index, running offset)
        auto rec = [&](auto&& self, size_t cell, size_t ell, int offset) -> bool {
            if (ell < bracket.ellipsis_before.size() &&
                bracket.ellipsis_before[ell] == static_cast<int>(cell)) {
                int remaining_cells = static_cast<int>(bracket.cells.size() - cell);
                for (int span = 0; offset + span + remaining_cells - 1 <= limit; ++span) {
                    if (remaining_cells == 0 && span > 0) break;  // trailing ellipsis: 0 is enough
                    pos.spans[ell] = span;
                    if (self(self, cell, ell + 1, offset + span)) return true;
                }
                return false;
            }
            if (cell == bracket.cells.size()) return true;
            if (offset > limit) return false;
            int cx = x0 + dx * offset, cy = y0 + dy * offset;
            CellBinding* b = bindings ? &(*bindings)[cell] : nullptr;
            if (!cell_matches(bracket.cells[cell], cx, cy, b)) return false;
            return self(self, cell + 1, ell, offset + 1);
        };
        if (static_cast<int>(bracket.cells.size()) - 1 > limit &&
            bracket.ellipsis_before.empty()) {
            return false;
        }
        if (!rec(rec, 0, 0, 0)) return false;
        pos.x = x0;
        pos.y = y0;
        return true;
    }

    void collect_matches(const CompiledBracket& bracket, AbsDir dir,
                         std::vector<MatchPos>& out) const {
        MatchPos pos;
        for (int y = 0; y < s_.height; ++y)
            for (int x = 0; x < s_.width; ++x)
                if (match_bracket_at(bracket, dir, x, y, pos, nullptr)) out.push_back(pos);
    }

    // ---- rewriting ----

    /// Applies one bracket's rewrite at a matched position. Bindings are
    /// re-derived by re-matching so rewrites of earlier brackets in the same
    /// application stay consistent. Returns whether anything changed.
    bool apply_bracket(const CompiledBracket& match, const CompiledBracket& rewrite, AbsDir dir,
                       const MatchPos& pos, bool dry_run, std::vector<CellBinding>& bindings) {
        bindings.assign(match.cells.size(), CellBinding{});
        MatchPos repos = pos;
        if (!match_bracket_at(match, dir, pos.x, pos.y, repos, &bindings)) return false;

        int dx = dir_dx(dir), dy = dir_dy(dir);
        bool changed = false;
        size_t ell = 0;
        int offset = 0;
        for (size_t c = 0; c < match.cells.size(); ++c) {
            while (ell < match.ellipsis_before.size() &&
                   match.ellipsis_before[ell] == static_cast<int>(c)) {
                offset += repos.spans[ell];
                ++ell;
            }
            int cx = pos.x + dx * offset, cy = pos.y + dy * offset;
            ++offset;

            const CompiledCell& lhs = match.cells[c];
            const CompiledCell& rhs = rewrite.cells[c];
            const CellBinding& bind = bindings[c];

            // desired final (object, motion) per touched slot; removals that
            // are rewritten in the same cell must not register as changes
            struct SlotWrite {
                size_t idx;
                ObjectId id;
                MotionVal mv;
            };
            std::array<SlotWrite, 16> writes;
            size_t write_count = 0;
            auto want = [&](int layer, ObjectId id, MotionVal mv) {
                size_t idx = slot_index(cx, cy, layer);
                for (size_t w = 0; w < write_count; ++w) {
                    if (writes[w].idx == idx) {
                        writes[w].id = id;
                        writes[w].mv = mv;
                        return;
                    }
                }
                if (write_count < writes.size()) writes[write_count++] = {idx, id, mv};
            };

            for (size_t a = 0; a < lhs.atoms.size(); ++a) {
                if (lhs.atoms[a].negated) continue;
                ObjectId obj = bind.object[a];
                if (obj == kNoObject) continue;
                want(g_.objects[obj - 1].layer, kNoObject, MotionVal::none);
            }
            for (const CompiledAtom& atom : rhs.atoms) {
                if (atom.negated) {
                    for (ObjectId id : atom.members) {
                        int layer = g_.objects[id - 1].layer;
                        if (s_.grid[slot_index(cx, cy, layer)] == id)
                            want(layer, kNoObject, MotionVal::none);
                    }
                    continue;
                }
                ObjectId obj;
                if (atom.members.size() == 1) {
                    obj = atom.members[0];
                } else {
                    obj = bind.object[atom.bind_atom];
                    if (obj == kNoObject) obj = atom.members[0];
                }
                MotionVal mv = MotionVal::none;
                switch (atom.motion) {
                    case RunMotion::any:
                    case RunMotion::none: mv = MotionVal::none; break;
                    case RunMotion::up: mv = MotionVal::up; break;
                    case RunMotion::down: mv = MotionVal::down; break;
                    case RunMotion::left: mv = MotionVal::left; break;
                    case RunMotion::right: mv = MotionVal::right; break;
                    case RunMotion::action: mv = MotionVal::action; break;
                    case RunMotion::moving:
                        mv = atom.bind_atom >= 0 ? bind.motion[atom.bind_atom] : MotionVal::none;
                        break;
                }
                want(g_.objects[obj - 1].layer, obj, mv);
            }

            for (size_t w = 0; w < write_count; ++w) {
                const SlotWrite& sw = writes[w];
                if (s_.grid[sw.idx] != sw.id ||
                    static_cast<MotionVal>(s_.motions[sw.idx]) != sw.mv) {
                    changed = true;
                    if (!dry_run) {
                        s_.grid[sw.idx] = sw.id;
                        s_.motions[sw.idx] = static_cast<uint8_t>(sw.mv);
                    }
                }
            }
        }
        return changed;
    }

    bool apply_match(const CompiledRule& rule, const std::vector<MatchPos>& combo, bool dry_run,
                     std::vector<CellBinding>& scratch) {
        if (rule.rewrite.empty()) return false;  // command-only rules never change cells
        bool changed = false;
        for (size_t b = 0; b < rule.match.size(); ++b) {
            changed |= apply_bracket(rule.match[b], rule.rewrite[b], rule.direction, combo[b],
                                     dry_run, scratch);
        }
        return changed;
    }

    const CompiledGame& g_;
    GameState& s_;
};

struct CommandSink {
    bool cancel = false, win = false, again = false, checkpoint = false, restart = false;
    std::vector<std::string> messages;
};

void queue_commands(const CompiledRule& rule, CommandSink& sink) {
    for (const Command& c : rule.commands) {
        switch (c.kind) {
            case CommandKind::cancel: sink.cancel = true; break;
            case CommandKind::win: sink.win = true; break;
            case CommandKind::again: sink.again = true; break;
            case CommandKind::checkpoint: sink.checkpoint = true; break;
            case CommandKind::restart: sink.restart = true; break;
            case CommandKind::message: sink.messages.push_back(c.text); break;
            case CommandKind::sfx: break;  // parsed, ignored
        }
    }
}

struct PhaseResult {
    bool cap_exceeded = false;
};

/// Applies one rule phase to fixpoint: scan rules in order, apply the first
/// state-changing match, restart from the first rule. Rules that match
/// without changing anything still queue their commands (once per phase).
PhaseResult apply_rule_phase(const CompiledGame& game, GameState& state, bool late,
                             CommandSink& sink, uint64_t& rng_state) {
    Engine eng(game, state);
    PhaseResult result;
    int applications = 0;

    std::vector<bool> commands_queued(game.rules.size(), false);
    std::vector<std::vector<MatchPos>> per_bracket;
    std::vector<MatchPos> combo;
    std::vector<CellBinding> scratch;

    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (size_t ri = 0; ri < game.rules.size(); ++ri) {
            const CompiledRule& rule = game.rules[ri];
            if (rule.late != late) continue;
            if (sink.cancel) return result;

            size_t nb = rule.match.size();
            per_bracket.assign(nb, {});
            bool all_brackets_match = true;
            for (size_t b = 0; b < nb && all_brackets_match; ++b) {
                eng.collect_matches(rule.match[b], rule.direction, per_bracket[b]);
                if (per_bracket[b].empty()) all_brackets_match = false;
            }
            if (!all_brackets_match) continue;

            if (!commands_queued[ri]) {
                queue_commands(rule, sink);
                commands_queued[ri] = true;
            }
            if (rule.rewrite.empty()) continue;

            // enumerate combinations lexicographically, first bracket slowest
            std::vector<size_t> idx(nb, 0);
            std::vector<size_t> changing;  // for random rules: flat combo indices
            size_t total = 1;
            for (const auto& m : per_bracket) total *= m.size();
            constexpr size_t kComboCap = 65536;
            if (total > kComboCap) total = kComboCap;

            bool applied = false;
            for (size_t flat = 0; flat < total; ++flat) {
                size_t rem = flat;
                combo.resize(nb);
                for (size_t b = 0; b < nb; ++b) {
                    combo[b] = per_bracket[b][rem % per_bracket[b].size()];
                    rem /= per_bracket[b].size();
                }
                if (rule.random) {
                    if (eng.apply_match(rule, combo, /*dry_run=*/true, scratch))
                        changing.push_back(flat);
                    continue;
                }
                if (eng.apply_match(rule, combo, /*dry_run=*/false, scratch)) {
                    applied = true;
                    break;
                }
            }
            if (rule.random && !changing.empty()) {
                size_t pick = changing[splitmix64(rng_state) % changing.size()];
                size_t rem = pick;
                combo.resize(nb);
                for (size_t b = 0; b < nb; ++b) {
                    combo[b] = per_bracket[b][rem % per_bracket[b].size()];
                    rem /= per_bracket[b].size();
                }
                eng.apply_match(rule, combo, /*dry_run=*/false, scratch);
                applied = true;
            }

            if (applied) {
                if (++applications > engine_limits::kMaxRuleApplicationsPerPhase) {
                    result.cap_exceeded = true;
                    return result;
                }
                progressed = true;
                break;  // restart the scan from the first rule
            }
        }
    }
    return result;
}

std::vector<ObjectId> build_level_grid(const CompiledGame& game, const CompiledLevel& level) {
    std::vector<ObjectId> grid = level.cells;
    if (game.background_id != kNoObject && game.layer_count > 0) {
        int bg_layer = game.objects[game.background_id - 1].layer;
        if (bg_layer >= 0) {
            for (size_t cell = 0; cell < grid.size() / game.layer_count; ++cell) {
                ObjectId& slot = grid[cell * game.layer_count + bg_layer];
                if (slot == kNoObject) slot = game.background_id;
            }
        }
    }
    return grid;
}

struct TurnResult {
    std::vector<Event> events;
    std::optional<Diagnostic> error;
};

/// Phases 2..6 with the again loop. `state` is mutated in place; on cancel
/// or a cap error it is restored to its entry value.
TurnResult run_turn_phases(const CompiledGame& game, GameState& state) {
    TurnResult out;
    GameState pre_turn = state;
    int again_count = 0;

    for (;;) {
        CommandSink sink;
        std::vector<ObjectId> grid_before_pass = state.grid;

        PhaseResult phase = apply_rule_phase(game, state, /*late=*/false, sink, state.rng_seed);
        if (phase.cap_exceeded) {
            state = pre_turn;
            out.events.push_back(Event{EventKind::cancelled, "", 0});
            out.error = make_error(Phase::runtime, 1, 1, codes::rule_loop_detected,
                                   "rule application cap exceeded (" +
                                       std::to_string(engine_limits::kMaxRuleApplicationsPerPhase) +
                                       " per phase)");
            return out;
        }
        if (!sink.cancel) {
            resolve_movement(state);
            phase = apply_rule_phase(game, state, /*late=*/true, sink, state.rng_seed);
            if (phase.cap_exceeded) {
                state = pre_turn;
                out.events.push_back(Event{EventKind::cancelled, "", 0});
                out.error = make_error(Phase::runtime, 1, 1, codes::rule_loop_detected,
                                       "late rule application cap exceeded");
                return out;
            }
        }
        if (sink.cancel) {
            state = pre_turn;
            out.events.push_back(Event{EventKind::cancelled, "", 0});
            return out;
        }

        if (sink.checkpoint) {
            state.checkpoint = state.grid;
            out.events.push_back(Event{EventKind::checkpoint_set, "", 0});
        }
        if (sink.restart) {
            if (state.checkpoint) {
                state.grid = *state.checkpoint;
            } else {
                state.grid = build_level_grid(game, game.levels[state.level_index]);
            }
            std::fill(state.motions.begin(), state.motions.end(), 0);
            out.events.push_back(Event{EventKind::restarted, "", 0});
        }
        for (auto& msg : sink.messages) out.events.push_back(Event{EventKind::message, msg, 0});

        if (sink.win || check_win(game, state)) {
            state.status = GameState::Status::won;
            out.events.push_back(Event{EventKind::won, "", 0});
            break;
        }

        if (!sink.again) break;
        if (state.grid == grid_before_pass) break;  // again without progress stops cleanly
        if (++again_count > engine_limits::kMaxAgainRepetitions) {
            state = pre_turn;
            out.events.push_back(Event{EventKind::cancelled, "", 0});
            out.error = make_error(Phase::runtime, 1, 1, codes::rule_loop_detected,
                                   "'again' repetition cap exceeded (" +
                                       std::to_string(engine_limits::kMaxAgainRepetitions) + ")");
            return out;
        }
    }

    if (again_count > 0)
        out.events.push_back(Event{EventKind::again_ran, "", again_count});
    return out;
}

}  // namespace

void resolve_movement(GameState& s) {
    if (s.motions.empty()) return;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int y = 0; y < s.height; ++y) {
            for (int x = 0; x < s.width; ++x) {
                for (int layer = 0; layer < s.layers; ++layer) {
                    size_t idx = (static_cast<size_t>(y) * s.width + x) * s.layers + layer;
                    MotionVal mv = static_cast<MotionVal>(s.motions[idx]);
                    if (mv == MotionVal::none) continue;
                    if (mv == MotionVal::action || s.grid[idx] == kNoObject) {
                        s.motions[idx] = 0;
                        continue;
                    }
                    int nx = x, ny = y;
                    switch (mv) {
                        case MotionVal::up: --ny; break;
                        case MotionVal::down: ++ny; break;
                        case MotionVal::left: --nx; break;
                        case MotionVal::right: ++nx; break;
                        default: break;
                    }
                    if (nx < 0 || ny < 0 || nx >= s.width || ny >= s.height) {
                        s.motions[idx] = 0;  // off-grid, no wraparound
                        progress = true;
                        continue;
                    }
                    size_t dest = (static_cast<size_t>(ny) * s.width + nx) * s.layers + layer;
                    if (s.grid[dest] == kNoObject) {
                        s.grid[dest] = s.grid[idx];
                        s.grid[idx] = kNoObject;
                        s.motions[dest] = 0;
                        s.motions[idx] = 0;
                        progress = true;
                    }
                }
            }
        }
    }
    std::fill(s.motions.begin(), s.motions.end(), 0);
}

bool check_win(const CompiledGame& game, const GameState& s) {
    if (game.win_conditions.empty()) return false;

    auto cell_has = [&](size_t cell, const std::vector<ObjectId>& ids) {
        for (ObjectId id : ids) {
            int layer = game.objects[id - 1].layer;
            if (layer >= 0 && s.grid[cell * s.layers + layer] == id) return true;
        }
        return false;
    };

    size_t cells = static_cast<size_t>(s.width) * s.height;
    for (const CompiledWin& w : game.win_conditions) {
        bool has_target = !w.target.empty();
        switch (w.quantifier) {
            case WinQuantifier::all: {
                for (size_t c = 0; c < cells; ++c)
                    if (cell_has(c, w.subject) && !cell_has(c, w.target)) return false;
                break;
            }
            case WinQuantifier::some: {
                bool witness = false;
                for (size_t c = 0; c < cells && !witness; ++c)
                    witness = cell_has(c, w.subject) && (!has_target || cell_has(c, w.target));
                if (!witness) return false;
                break;
            }
            case WinQuantifier::none: {
                for (size_t c = 0; c < cells; ++c)
                    if (cell_has(c, w.subject) && (!has_target || cell_has(c, w.target)))
                        return false;
                break;
            }
        }
    }
    return true;
}

GameState init_state(const CompiledGame& game, int level_index) {
    if (level_index < 0 || level_index >= static_cast<int>(game.levels.size()))
        throw std::out_of_range("level index " + std::to_string(level_index) + " out of range");
    const CompiledLevel& level = game.levels[level_index];
    if (level.is_message)
        throw std::invalid_argument("level " + std::to_string(level_index) + " is a message, not a grid");

    GameState s;
    s.width = level.width;
    s.height = level.height;
    s.layers = game.layer_count;
    s.level_index = level_index;
    s.grid = build_level_grid(game, level);

    if (game.flags.run_rules_on_level_start) {
        s.motions.assign(s.grid.size(), 0);
        run_turn_phases(game, s);  // input-free pass; win may trigger here
        s.motions.clear();
    }
    return s;
}

TurnOutcome step(const CompiledGame& game, const GameState& state, Action action) {
    if (state.status != GameState::Status::in_progress)
        throw std::logic_error("step() on a finished game");

    TurnOutcome outcome;
    GameState work = state;
    work.motions.assign(work.grid.size(), 0);

    MotionVal mv = MotionVal::action;
    switch (action) {
        case Action::up: mv = MotionVal::up; break;
        case Action::down: mv = MotionVal::down; break;
        case Action::left: mv = MotionVal::left; break;
        case Action::right: mv = MotionVal::right; break;
        case Action::act: mv = MotionVal::action; break;
    }
    for (ObjectId id : game.player_ids) {
        int layer = game.objects[id - 1].layer;
        if (layer < 0) continue;
        for (size_t cell = 0; cell < work.grid.size() / work.layers; ++cell) {
            size_t idx = cell * work.layers + layer;
            if (work.grid[idx] == id) work.motions[idx] = static_cast<uint8_t>(mv);
        }
    }

    TurnResult turn = run_turn_phases(game, work);
    outcome.events = std::move(turn.events);
    outcome.error = std::move(turn.error);
    work.motions.clear();
    outcome.changed = work.grid != state.grid;
    outcome.state = std::move(work);
    return outcome;
}

Digest hash_state(const GameState& s) {
    uint64_t seed = (static_cast<uint64_t>(static_cast<uint32_t>(s.width)) << 40) ^
                    (static_cast<uint64_t>(static_cast<uint32_t>(s.height)) << 16) ^
                    (static_cast<uint64_t>(static_cast<uint32_t>(s.layers)) << 8) ^
                    static_cast<uint64_t>(s.status);
    // grid is a little-endian uint16 buffer on every supported target
    return murmur3_x64_128(s.grid.data(), s.grid.size() * sizeof(ObjectId), seed);
}

std::vector<std::string> encode_level(const CompiledGame& game, const GameState& s) {
    std::vector<std::string> rows;
    rows.reserve(s.height);
    for (int y = 0; y < s.height; ++y) {
        std::string row;
        for (int x = 0; x < s.width; ++x) {
            std::vector<ObjectId> present;
            for (int l = 0; l < s.layers; ++l) {
                ObjectId id = s.at(x, y, l);
                if (id != kNoObject) present.push_back(id);
            }
            std::sort(present.begin(), present.end());
            std::vector<ObjectId> no_bg;
            for (ObjectId id : present)
                if (id != game.background_id) no_bg.push_back(id);

            char glyph = '?';
            for (const auto& [g, members] : game.glyphs) {
                if (members == present || (!no_bg.empty() && members == no_bg)) {
                    glyph = g[0];
                    break;
                }
            }
            if (glyph == '?' && no_bg.empty()) {
                for (const auto& [g, members] : game.glyphs) {
                    if (members.size() == 1 && members[0] == game.background_id) {
                        glyph = g[0];
                        break;
                    }
                }
            }
            row.push_back(glyph);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace pskit
