#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pskit/ast.hpp"
#include "pskit/diagnostics.hpp"

namespace pskit {

/// Object ids are 1-based; 0 means an empty layer slot.
using ObjectId = uint16_t;
inline constexpr ObjectId kNoObject = 0;

enum class AbsDir : uint8_t { up, down, left, right };
int dir_dx(AbsDir d);
int dir_dy(AbsDir d);

struct CompiledObject {
    std::string name;          // lowercased identity
    std::string display_name;  // original casing
    int layer = -1;
    std::vector<Color> colors;
    Sprite sprite;
    std::string glyph;  // preferred single-char glyph for rendering, may be empty
};

/// Resolution of an entity reference: the set of concrete objects it can
/// stand for.
struct EntitySet {
    LegendKind kind = LegendKind::alias;  // alias/single, aggregate (AND), property (OR)
    std::vector<ObjectId> members;        // sorted, deduplicated
};

/// Legend plus object names resolved to object ids. Built by compile();
/// expand_rule() takes it so rules can be compiled in isolation.
class ResolvedLegend {
public:
    void add(std::string name_lower, EntitySet set) { table_[std::move(name_lower)] = std::move(set); }
    const EntitySet* find(std::string_view name_lower) const;
    int layer_of(ObjectId id) const { return layers_.empty() ? -1 : layers_[id]; }
    void set_layers(std::vector<int> layers) { layers_ = std::move(layers); }

private:
    std::map<std::string, EntitySet, std::less<>> table_;
    std::vector<int> layers_;  // indexed by object id
};

/// Motion constraint/assignment after direction expansion.
enum class RunMotion : uint8_t { any, none, up, down, left, right, action, moving };

struct CompiledAtom {
    bool negated = false;
    RunMotion motion = RunMotion::any;  // LHS: `any` = unconstrained; RHS: `any` means write stationary
    std::vector<ObjectId> members;      // >1 = property alternatives
    int bind_atom = -1;  // RHS only: index of the LHS atom (same cell) that binds identity/motion
};

struct CompiledCell {
    std::vector<CompiledAtom> atoms;
};

struct CompiledBracket {
    std::vector<CompiledCell> cells;
    std::vector<int> ellipsis_before;  // same convention as BracketPattern
};

struct CompiledRule {
    int source_index = -1;  // index into GameSpec::rules
    AbsDir direction = AbsDir::up;
    bool late = false;
    bool random = false;
    std::vector<CompiledBracket> match;
    std::vector<CompiledBracket> rewrite;  // empty => command-only rule
    std::vector<Command> commands;
};

struct CompiledWin {
    WinQuantifier quantifier;
    std::vector<ObjectId> subject;
    std::vector<ObjectId> target;  // empty when no `on` clause
};

struct CompiledLevel {
    bool is_message = false;
    std::string message;
    int width = 0, height = 0;
    std::vector<ObjectId> cells;  // (y*width + x)*layer_count + layer
};

struct GameFlags {
    std::string title, author, homepage;
    std::optional<Color> background_color, text_color;
    bool run_rules_on_level_start = false;
    bool norepeat_action = false;
};

struct CompiledGame {
    std::vector<CompiledObject> objects;  // objects[id-1]
    int layer_count = 0;
    std::vector<std::vector<ObjectId>> layer_members;
    ObjectId background_id = kNoObject;
    std::vector<ObjectId> player_ids;  // objects reachable from the name `player`
    std::vector<CompiledRule> rules;   // source order; direction variants adjacent
    std::vector<CompiledWin> win_conditions;
    std::vector<CompiledLevel> levels;
    GameFlags flags;
    bool has_random_rules = false;
    // glyph -> objects, for level re-encoding and rendering
    std::vector<std::pair<std::string, std::vector<ObjectId>>> glyphs;

    const CompiledObject& object(ObjectId id) const { return objects[id - 1]; }
    int grid_level_count() const;
};

struct CompileResult {
    std::optional<CompiledGame> game;  // present iff no semantic errors
    std::vector<Diagnostic> diagnostics;
};

/// Semantic analysis + lowering. Deterministic: the same spec always yields
/// the same diagnostics and game. Warnings never block compilation.
CompileResult compile(const GameSpec& spec);

/// Expands one rule into absolute-direction variants (4 for unconstrained,
/// 2 for horizontal/vertical, 1 otherwise), resolving relative motion
/// markers against each variant's direction. Emits diagnostics for arity
/// mismatches and unsupported constructs; returns no variants in that case.
std::vector<CompiledRule> expand_rule(const RuleDef& rule, int source_index,
                                      const ResolvedLegend& legend,
                                      std::vector<Diagnostic>& diagnostics);

}  // namespace pskit
