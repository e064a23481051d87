#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pskit/colors.hpp"

namespace pskit {

/// 5x5 pixel grid; -1 = transparent, otherwise an index into the object's
/// color list. `solid` objects have no grid and draw as color 0.
struct Sprite {
    bool solid = true;
    std::array<std::array<int8_t, 5>, 5> cells{};

    bool operator==(const Sprite& o) const {
        if (solid != o.solid) return false;
        return solid || cells == o.cells;
    }
};

struct ObjectDef {
    std::string name;  // original casing; identity is case-insensitive
    std::vector<Color> colors;
    Sprite sprite;
    int line = 0;
};

enum class LegendKind { alias, aggregate, property };

struct LegendEntry {
    std::string glyph;  // single char or identifier
    LegendKind kind = LegendKind::alias;
    std::vector<std::string> members;
    int line = 0;
};

/// Motion qualifier on a rule atom. Relative markers (> < ^ v) are resolved
/// against the rule's absolute direction at compile time.
enum class Motion : uint8_t {
    none,        // unqualified
    rel_fwd,     // >
    rel_back,    // <
    rel_up,      // ^
    rel_down,    // v
    abs_up,
    abs_down,
    abs_left,
    abs_right,
    moving,
    stationary,
    action,
    randomdir,   // parsed, rejected at compile time
};

struct Atom {
    bool negated = false;   // `no` prefix
    Motion motion = Motion::none;
    std::string entity;

    bool operator==(const Atom&) const = default;
};

struct CellPattern {
    std::vector<Atom> atoms;  // empty = wildcard cell on LHS, no-op cell on RHS

    bool operator==(const CellPattern&) const = default;
};

/// One `[ ... | ... ]` group. `ellipsis_before[i]` says an `...` sits
/// immediately before cells[i]; a value of cells.size() puts it at the end.
struct BracketPattern {
    std::vector<CellPattern> cells;
    std::vector<int> ellipsis_before;

    bool operator==(const BracketPattern&) const = default;
};

// orthogonal/perpendicular/parallel are parsed but outside the supported
// subset; the compiler rejects them with UNSUPPORTED_FEATURE.
enum class DirConstraint : uint8_t {
    none, up, down, left, right, horizontal, vertical,
    orthogonal, perpendicular, parallel,
};

enum class CommandKind : uint8_t { cancel, win, again, checkpoint, restart, message, sfx };

struct Command {
    CommandKind kind;
    std::string text;  // message payload; empty otherwise

    bool operator==(const Command&) const = default;
};

struct RuleDef {
    bool late = false;
    bool random = false;
    bool rigid = false;  // parsed, rejected at compile time
    DirConstraint dir = DirConstraint::none;
    std::vector<BracketPattern> lhs;
    std::vector<BracketPattern> rhs;  // may be empty (command-only rule)
    std::vector<Command> commands;
    bool plus_grouped = false;  // '+' prefix; treated as plain sequential ordering
    int line = 0;
};

enum class WinQuantifier : uint8_t { all, some, none };

struct WinCondition {
    WinQuantifier quantifier = WinQuantifier::all;
    std::string subject;
    std::optional<std::string> on_target;
    int line = 0;
};

struct LevelEntry {
    bool is_message = false;
    std::string message;
    std::vector<std::string> rows;  // equal-length glyph strings
    int line = 0;
};

/// Parsed form of one PuzzleScript program. Lists preserve source order;
/// printing emits sections in the canonical order.
struct GameSpec {
    std::vector<std::pair<std::string, std::string>> prelude;  // lowercased key, raw value
    std::vector<ObjectDef> objects;
    std::vector<LegendEntry> legend;
    std::vector<std::string> sounds;  // retained, otherwise ignored
    std::vector<std::vector<std::string>> collision_layers;
    std::vector<RuleDef> rules;
    std::vector<WinCondition> win_conditions;
    std::vector<LevelEntry> levels;
    // constructs recognized by the grammar but outside the supported
    // subset (startloop/endloop); compile() reports each
    std::vector<std::pair<int, std::string>> unsupported_lines;
};

/// Equality up to source positions; identifier comparison is
/// case-insensitive (PuzzleScript identifiers are).
bool structurally_equal(const GameSpec& a, const GameSpec& b);

std::string to_lower(std::string_view s);

}  // namespace pskit
