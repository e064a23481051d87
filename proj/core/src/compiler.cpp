#include "pskit/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pskit {

int dir_dx(AbsDir d) {
    switch (d) {
        case AbsDir::left: return -1;
        case AbsDir::right: return 1;
        default: return 0;
    }
}

int dir_dy(AbsDir d) {
    switch (d) {
        case AbsDir::up: return -1;
        case AbsDir::down: return 1;
        default: return 0;
    }
}

const EntitySet* ResolvedLegend::find(std::string_view name_lower) const {
    auto it = table_.find(name_lower);
    return it == table_.end() ? nullptr : &it->second;
}

int CompiledGame::grid_level_count() const {
    return static_cast<int>(std::count_if(levels.begin(), levels.end(),
                                          [](const CompiledLevel& l) { return !l.is_message; }));
}

namespace {

// official relative-direction table: {^, v, <, >} resolved per rule direction
RunMotion relative_motion(AbsDir rule_dir, Motion m) {
    static constexpr RunMotion table[4][4] = {
        // ^               v                <                >
        {RunMotion::left, RunMotion::right, RunMotion::down, RunMotion::up},    // up
        {RunMotion::right, RunMotion::left, RunMotion::up, RunMotion::down},    // down
        {RunMotion::down, RunMotion::up, RunMotion::right, RunMotion::left},    // left
        {RunMotion::up, RunMotion::down, RunMotion::left, RunMotion::right},    // right
    };
    int row = static_cast<int>(rule_dir);
    switch (m) {
        case Motion::rel_up: return table[row][0];
        case Motion::rel_down: return table[row][1];
        case Motion::rel_back: return table[row][2];
        case Motion::rel_fwd: return table[row][3];
        default: return RunMotion::any;
    }
}

std::vector<AbsDir> direction_variants(DirConstraint c) {
    switch (c) {
        case DirConstraint::none: return {AbsDir::up, AbsDir::down, AbsDir::left, AbsDir::right};
        case DirConstraint::horizontal: return {AbsDir::left, AbsDir::right};
        case DirConstraint::vertical: return {AbsDir::up, AbsDir::down};
        case DirConstraint::up: return {AbsDir::up};
        case DirConstraint::down: return {AbsDir::down};
        case DirConstraint::left: return {AbsDir::left};
        case DirConstraint::right: return {AbsDir::right};
        default: return {};
    }
}

void semantic_error(std::vector<Diagnostic>& diags, int line, std::string_view code, std::string msg) {
    diags.push_back(make_error(Phase::semantic, line, 1, code, std::move(msg)));
}

/// Resolves object and legend names into EntitySets with cycle detection.
/// Failed names end up in the legend as empty sets, which downstream code
/// treats as "already reported".
class LegendBuilder {
public:
    LegendBuilder(const GameSpec& spec, std::vector<Diagnostic>& diags) : spec_(spec), diags_(diags) {}

    const std::map<std::string, ObjectId, std::less<>>& object_ids() const { return object_ids_; }
    ResolvedLegend take_legend() { return std::move(legend_); }

    ObjectId add_object(const ObjectDef& def, std::vector<CompiledObject>& objects,
                        std::vector<int>& def_lines) {
        std::string low = to_lower(def.name);
        if (object_ids_.count(low)) {
            semantic_error(diags_, def.line, codes::duplicate_definition,
                           "object '" + def.name + "' is defined twice");
            return kNoObject;
        }
        CompiledObject co;
        co.name = low;
        co.display_name = def.name;
        co.colors = def.colors;
        co.sprite = def.sprite;
        objects.push_back(std::move(co));
        def_lines.push_back(def.line);
        ObjectId id = static_cast<ObjectId>(objects.size());
        object_ids_[low] = id;
        EntitySet set;
        set.kind = LegendKind::alias;
        set.members = {id};
        legend_.add(low, std::move(set));
        return id;
    }

    void add_legend_entry(const LegendEntry& entry) {
        std::string low = to_lower(entry.glyph);
        if (object_ids_.count(low)) {
            semantic_error(diags_, entry.line, codes::duplicate_definition,
                           "legend name '" + entry.glyph + "' collides with an object name");
            return;
        }
        if (entries_.count(low)) {
            semantic_error(diags_, entry.line, codes::duplicate_definition,
                           "legend name '" + entry.glyph + "' is defined twice");
            return;
        }
        entries_[low] = &entry;
    }

    void resolve_all() {
        for (const auto& [name, entry] : entries_) resolve(name);
    }

    /// Lookup after resolve_all(); nullptr = unknown name, empty members =
    /// known but previously reported as broken.
    const EntitySet* lookup(std::string_view name_lower) const { return legend_.find(name_lower); }

    void set_layers(std::vector<int> layers) { legend_.set_layers(std::move(layers)); }
    int layer_of(ObjectId id) const { return legend_.layer_of(id); }

private:
    const EntitySet* resolve(const std::string& low) {
        if (const EntitySet* found = legend_.find(low)) return found;
        auto it = entries_.find(low);
        if (it == entries_.end()) return nullptr;
        if (!visiting_.insert(low).second) {
            semantic_error(diags_, it->second->line, codes::undefined_object,
                           "legend entry '" + it->second->glyph +
                               "' refers to itself (directly or through a cycle)");
            legend_.add(low, EntitySet{});
            return legend_.find(low);
        }

        const LegendEntry& entry = *it->second;
        EntitySet set;
        set.kind = entry.kind;
        bool ok = true;
        for (const auto& member : entry.members) {
            const EntitySet* sub = resolve(to_lower(member));
            if (!sub) {
                semantic_error(diags_, entry.line, codes::undefined_object,
                               "'" + member + "' is not a defined object or legend name");
                ok = false;
                continue;
            }
            if (sub->members.empty()) {  // broken dependency, already reported
                ok = false;
                continue;
            }
            if (entry.kind == LegendKind::property && sub->kind == LegendKind::aggregate) {
                semantic_error(diags_, entry.line, codes::unsupported_feature,
                               "property '" + entry.glyph + "' cannot contain the aggregate '" +
                                   member + "'");
                ok = false;
                continue;
            }
            if (entry.kind == LegendKind::aggregate && sub->kind == LegendKind::property) {
                semantic_error(diags_, entry.line, codes::unsupported_feature,
                               "aggregate '" + entry.glyph + "' cannot contain the property '" +
                                   member + "'");
                ok = false;
                continue;
            }
            set.members.insert(set.members.end(), sub->members.begin(), sub->members.end());
        }
        visiting_.erase(low);
        if (entry.kind == LegendKind::alias && ok) {
            const EntitySet* sub = resolve(to_lower(entry.members[0]));
            if (sub) set.kind = sub->kind;  // alias inherits what it points at
        }
        std::sort(set.members.begin(), set.members.end());
        set.members.erase(std::unique(set.members.begin(), set.members.end()), set.members.end());
        if (!ok) set.members.clear();
        legend_.add(low, std::move(set));
        return legend_.find(low);
    }

    const GameSpec& spec_;
    std::vector<Diagnostic>& diags_;
    std::map<std::string, ObjectId, std::less<>> object_ids_;
    std::map<std::string, const LegendEntry*, std::less<>> entries_;
    std::set<std::string> visiting_;
    ResolvedLegend legend_;
};

bool compile_side(const std::vector<BracketPattern>& side, bool is_rhs, const RuleDef& rule,
                  AbsDir dir, const ResolvedLegend& legend, std::vector<Diagnostic>& diags,
                  std::vector<CompiledBracket>& out, const std::vector<CompiledBracket>& lhs_compiled) {
    out.clear();
    out.reserve(side.size());
    for (size_t b = 0; b < side.size(); ++b) {
        const BracketPattern& bracket = side[b];
        CompiledBracket cb;
        cb.ellipsis_before = bracket.ellipsis_before;
        for (size_t c = 0; c < bracket.cells.size(); ++c) {
            CompiledCell cc;
            for (const Atom& atom : bracket.cells[c].atoms) {
                const EntitySet* set = legend.find(to_lower(atom.entity));
                if (!set) {
                    semantic_error(diags, rule.line, codes::undefined_object,
                                   "'" + atom.entity + "' is not a defined object or legend name");
                    return false;
                }
                if (set->members.empty()) return false;  // broken name, reported at its definition
                if (set->kind == LegendKind::aggregate) {
                    semantic_error(diags, rule.line, codes::unsupported_feature,
                                   "aggregate '" + atom.entity + "' cannot appear in a rule cell");
                    return false;
                }
                if (rule.late && atom.motion != Motion::none) {
                    semantic_error(diags, rule.line, codes::unsupported_feature,
                                   "late rules cannot reference motions");
                    return false;
                }
                CompiledAtom ca;
                ca.negated = atom.negated;
                ca.members = set->members;
                switch (atom.motion) {
                    case Motion::none: ca.motion = RunMotion::any; break;
                    case Motion::moving: ca.motion = RunMotion::moving; break;
                    case Motion::stationary: ca.motion = RunMotion::none; break;
                    case Motion::action: ca.motion = RunMotion::action; break;
                    case Motion::abs_up: ca.motion = RunMotion::up; break;
                    case Motion::abs_down: ca.motion = RunMotion::down; break;
                    case Motion::abs_left: ca.motion = RunMotion::left; break;
                    case Motion::abs_right: ca.motion = RunMotion::right; break;
                    case Motion::randomdir:
                        semantic_error(diags, rule.line, codes::unsupported_feature,
                                       "'randomdir' is not supported");
                        return false;
                    default: ca.motion = relative_motion(dir, atom.motion); break;
                }
                if (is_rhs && !ca.negated) {
                    bool needs_identity = ca.members.size() > 1;
                    bool needs_motion = ca.motion == RunMotion::moving;
                    if (needs_identity || needs_motion) {
                        const CompiledCell& lhs_cell = lhs_compiled[b].cells[c];
                        for (size_t a = 0; a < lhs_cell.atoms.size(); ++a) {
                            const CompiledAtom& la = lhs_cell.atoms[a];
                            if (la.negated) continue;
                            if (needs_identity && la.members != ca.members) continue;
                            if (needs_motion && la.motion != RunMotion::moving) continue;
                            ca.bind_atom = static_cast<int>(a);
                            break;
                        }
                        if (ca.bind_atom < 0) {
                            semantic_error(
                                diags, rule.line, codes::unbound_property,
                                needs_identity
                                    ? "property '" + atom.entity +
                                          "' on the right side has no matching left-side atom"
                                    : "'moving " + atom.entity +
                                          "' on the right side has no 'moving' counterpart on the left");
                            return false;
                        }
                    }
                }
                cc.atoms.push_back(std::move(ca));
            }
            if (!is_rhs) {
                // positive single-object atoms must claim distinct layers
                std::set<int> claimed;
                for (const auto& a : cc.atoms) {
                    if (a.negated || a.members.size() != 1) continue;
                    int layer = legend.layer_of(a.members[0]);
                    if (layer >= 0 && !claimed.insert(layer).second) {
                        semantic_error(diags, rule.line, codes::rule_cell_collision,
                                       "rule cell places two objects on the same collision layer");
                        return false;
                    }
                }
            }
            cb.cells.push_back(std::move(cc));
        }
        out.push_back(std::move(cb));
    }
    return true;
}

}  // namespace

std::vector<CompiledRule> expand_rule(const RuleDef& rule, int source_index,
                                      const ResolvedLegend& legend,
                                      std::vector<Diagnostic>& diagnostics) {
    std::vector<CompiledRule> out;
    if (rule.rigid) {
        semantic_error(diagnostics, rule.line, codes::unsupported_feature,
                       "'rigid' rules are not supported");
        return out;
    }
    if (rule.dir == DirConstraint::orthogonal || rule.dir == DirConstraint::perpendicular ||
        rule.dir == DirConstraint::parallel) {
        semantic_error(diagnostics, rule.line, codes::unsupported_feature,
                       "rule direction keyword is not supported "
                       "(use up/down/left/right/horizontal/vertical)");
        return out;
    }
    if (!rule.rhs.empty()) {
        bool shape_ok = rule.rhs.size() == rule.lhs.size();
        for (size_t b = 0; shape_ok && b < rule.lhs.size(); ++b) {
            shape_ok = rule.lhs[b].cells.size() == rule.rhs[b].cells.size() &&
                       rule.lhs[b].ellipsis_before == rule.rhs[b].ellipsis_before;
        }
        if (!shape_ok) {
            semantic_error(diagnostics, rule.line, codes::rule_arity_mismatch,
                           "rule sides have mismatched bracket shapes");
            return out;
        }
    }

    for (AbsDir dir : direction_variants(rule.dir)) {
        CompiledRule cr;
        cr.source_index = source_index;
        cr.direction = dir;
        cr.late = rule.late;
        cr.random = rule.random;
        cr.commands = rule.commands;
        if (!compile_side(rule.lhs, false, rule, dir, legend, diagnostics, cr.match, {})) return {};
        if (!compile_side(rule.rhs, true, rule, dir, legend, diagnostics, cr.rewrite, cr.match))
            return {};
        out.push_back(std::move(cr));
    }
    return out;
}

CompileResult compile(const GameSpec& spec) {
    CompileResult result;
    std::vector<Diagnostic>& diags = result.diagnostics;
    CompiledGame game;
    LegendBuilder builder(spec, diags);
    std::vector<int> def_lines;  // per compiled object

    // --- objects & legend names ---
    if (spec.objects.empty()) {
        semantic_error(diags, 1, codes::undefined_object,
                       "no objects defined (OBJECTS section missing or empty)");
    }
    for (const auto& obj : spec.objects) builder.add_object(obj, game.objects, def_lines);
    for (const auto& entry : spec.legend) builder.add_legend_entry(entry);
    builder.resolve_all();

    // --- collision layers ---
    std::vector<int> layer_of(game.objects.size() + 1, -1);
    for (const auto& layer : spec.collision_layers) {
        int layer_index = static_cast<int>(game.layer_members.size());
        std::vector<ObjectId> members;
        for (const auto& ref : layer) {
            const EntitySet* set = builder.lookup(to_lower(ref));
            if (!set) {
                semantic_error(diags, 1, codes::undefined_object,
                               "collision layer references unknown name '" + ref + "'");
                continue;
            }
            if (set->members.empty()) continue;
            if (set->kind == LegendKind::aggregate) {
                semantic_error(diags, 1, codes::unsupported_feature,
                               "aggregate '" + ref + "' cannot appear in COLLISIONLAYERS");
                continue;
            }
            for (ObjectId id : set->members) {
                if (layer_of[id] == layer_index) continue;
                if (layer_of[id] >= 0) {
                    semantic_error(diags, 1, codes::object_in_many_layers,
                                   "object '" + game.objects[id - 1].display_name +
                                       "' appears in more than one collision layer");
                    continue;
                }
                layer_of[id] = layer_index;
                members.push_back(id);
            }
        }
        game.layer_members.push_back(std::move(members));
    }

    // --- background ---
    const EntitySet* background = builder.lookup("background");
    if (background && !background->members.empty()) {
        game.background_id = background->members.front();
        if (layer_of[game.background_id] < 0) {
            diags.push_back(make_warning(
                Phase::semantic, 1, 1, codes::background_layer_assumed,
                "Background is not in any collision layer; a bottom layer was added for it"));
            for (int& l : layer_of)
                if (l >= 0) ++l;
            game.layer_members.insert(game.layer_members.begin(), {game.background_id});
            layer_of[game.background_id] = 0;
        }
    } else {
        semantic_error(diags, 1, codes::undefined_object,
                       "a 'Background' object is required but none is defined");
    }

    for (size_t id = 1; id < layer_of.size(); ++id) {
        if (layer_of[id] < 0) {
            semantic_error(diags, def_lines[id - 1], codes::object_in_no_layer,
                           "object '" + game.objects[id - 1].display_name +
                               "' is not part of any collision layer");
        } else {
            game.objects[id - 1].layer = layer_of[id];
        }
    }
    game.layer_count = static_cast<int>(game.layer_members.size());
    builder.set_layers(layer_of);

    // --- player ---
    const EntitySet* player = builder.lookup("player");
    if (player && !player->members.empty()) {
        game.player_ids = player->members;
    } else {
        semantic_error(diags, 1, codes::no_player_defined,
                       "no object or legend entry named 'Player' exists");
    }

    // --- prelude flags ---
    for (const auto& [key, value] : spec.prelude) {
        if (key == "title") game.flags.title = value;
        else if (key == "author") game.flags.author = value;
        else if (key == "homepage") game.flags.homepage = value;
        else if (key == "background_color" || key == "text_color") {
            auto c = parse_color(value);
            if (!c) {
                semantic_error(diags, 1, codes::invalid_color,
                               "prelude setting '" + key + "' has invalid color '" + value + "'");
            } else if (key == "background_color") {
                game.flags.background_color = *c;
            } else {
                game.flags.text_color = *c;
            }
        } else if (key == "run_rules_on_level_start") {
            game.flags.run_rules_on_level_start = true;
        } else if (key == "norepeat_action") {
            game.flags.norepeat_action = true;
        } else if (key == "again_interval") {
            // accepted and ignored: turns have no real-time pacing here
        } else {
            semantic_error(diags, 1, codes::unsupported_feature,
                           "prelude setting '" + key + "' is not supported");
        }
    }

    for (const auto& [line, what] : spec.unsupported_lines) {
        semantic_error(diags, line, codes::unsupported_feature, "'" + what + "' is not supported");
    }

    // --- rules ---
    ResolvedLegend legend_view = builder.take_legend();
    for (size_t i = 0; i < spec.rules.size(); ++i) {
        auto variants = expand_rule(spec.rules[i], static_cast<int>(i), legend_view, diags);
        for (auto& v : variants) game.rules.push_back(std::move(v));
        if (spec.rules[i].random) game.has_random_rules = true;
    }

    // --- win conditions ---
    for (const auto& wc : spec.win_conditions) {
        CompiledWin cw;
        cw.quantifier = wc.quantifier;
        const EntitySet* subject = legend_view.find(to_lower(wc.subject));
        if (!subject) {
            semantic_error(diags, wc.line, codes::undefined_object,
                           "'" + wc.subject + "' is not a defined object or legend name");
            continue;
        }
        if (subject->members.empty()) continue;
        if (subject->kind == LegendKind::aggregate) {
            semantic_error(diags, wc.line, codes::unsupported_feature,
                           "aggregate '" + wc.subject + "' cannot appear in a win condition");
            continue;
        }
        cw.subject = subject->members;
        if (wc.on_target) {
            const EntitySet* target = legend_view.find(to_lower(*wc.on_target));
            if (!target) {
                semantic_error(diags, wc.line, codes::undefined_object,
                               "'" + *wc.on_target + "' is not a defined object or legend name");
                continue;
            }
            if (target->members.empty()) continue;
            if (target->kind == LegendKind::aggregate) {
                semantic_error(diags, wc.line, codes::unsupported_feature,
                               "aggregate '" + *wc.on_target + "' cannot appear in a win condition");
                continue;
            }
            cw.target = target->members;
        }
        game.win_conditions.push_back(std::move(cw));
    }

    // --- glyph table ---
    for (const auto& [name, id] : builder.object_ids()) {
        if (name.size() == 1) game.glyphs.emplace_back(name, std::vector<ObjectId>{id});
    }
    for (const auto& entry : spec.legend) {
        std::string low = to_lower(entry.glyph);
        if (low.size() != 1) continue;
        const EntitySet* set = legend_view.find(low);
        if (set && !set->members.empty()) game.glyphs.emplace_back(low, set->members);
    }
    for (size_t id = 1; id <= game.objects.size(); ++id) {
        for (const auto& [glyph, members] : game.glyphs) {
            if (members.size() == 1 && members[0] == static_cast<ObjectId>(id)) {
                game.objects[id - 1].glyph = glyph;
                break;
            }
        }
    }

    // --- levels ---
    std::set<std::string> reported_glyphs;
    std::set<ObjectId> used;
    for (const auto& lvl : spec.levels) {
        CompiledLevel cl;
        if (lvl.is_message) {
            cl.is_message = true;
            cl.message = lvl.message;
            game.levels.push_back(std::move(cl));
            continue;
        }
        cl.width = lvl.rows.empty() ? 0 : static_cast<int>(lvl.rows[0].size());
        cl.height = static_cast<int>(lvl.rows.size());
        if (game.layer_count > 0)
            cl.cells.assign(static_cast<size_t>(cl.width) * cl.height * game.layer_count, kNoObject);
        for (int y = 0; y < cl.height; ++y) {
            const std::string& row = lvl.rows[y];
            for (int x = 0; x < cl.width && x < static_cast<int>(row.size()); ++x) {
                std::string glyph(1, static_cast<char>(std::tolower(static_cast<unsigned char>(row[x]))));
                const EntitySet* set = legend_view.find(glyph);
                if (!set || set->members.empty()) {
                    if (set == nullptr && reported_glyphs.insert(glyph).second) {
                        semantic_error(diags, lvl.line + y, codes::unknown_glyph_in_level,
                                       "level glyph '" + std::string(1, row[x]) +
                                           "' is not defined in the legend");
                    }
                    continue;
                }
                if (set->kind == LegendKind::property) {
                    if (reported_glyphs.insert(glyph).second) {
                        semantic_error(diags, lvl.line + y, codes::unknown_glyph_in_level,
                                       "level glyph '" + std::string(1, row[x]) +
                                           "' maps to a property (or-list), which is ambiguous in levels");
                    }
                    continue;
                }
                if (game.layer_count == 0) continue;
                for (ObjectId id : set->members) {
                    int layer = legend_view.layer_of(id);
                    if (layer < 0) continue;  // missing layer reported already
                    ObjectId& slot =
                        cl.cells[(static_cast<size_t>(y) * cl.width + x) * game.layer_count + layer];
                    if (slot != kNoObject && slot != id) {
                        semantic_error(diags, lvl.line + y, codes::level_cell_collision,
                                       "objects '" + game.objects[slot - 1].display_name + "' and '" +
                                           game.objects[id - 1].display_name +
                                           "' collide on one layer in this cell");
                        continue;
                    }
                    slot = id;
                    used.insert(id);
                }
            }
        }
        game.levels.push_back(std::move(cl));
    }

    // --- usage warnings ---
    for (const auto& rule : game.rules) {
        for (const auto* side : {&rule.match, &rule.rewrite})
            for (const auto& bracket : *side)
                for (const auto& cell : bracket.cells)
                    for (const auto& atom : cell.atoms)
                        for (ObjectId id : atom.members) used.insert(id);
    }
    for (const auto& w : game.win_conditions) {
        for (ObjectId id : w.subject) used.insert(id);
        for (ObjectId id : w.target) used.insert(id);
    }
    if (game.background_id != kNoObject) used.insert(game.background_id);
    for (ObjectId id : game.player_ids) used.insert(id);
    for (size_t i = 0; i < game.objects.size(); ++i) {
        ObjectId id = static_cast<ObjectId>(i + 1);
        if (!used.count(id)) {
            diags.push_back(make_warning(Phase::semantic, def_lines[i], 1, codes::unused_object,
                                         "object '" + game.objects[i].display_name +
                                             "' is never used in legend, rules, win conditions, or levels"));
        }
    }
    if (game.win_conditions.empty()) {
        diags.push_back(make_warning(Phase::semantic, 1, 1, codes::no_win_condition,
                                     "game has no win conditions and can never be won"));
    }
    if (game.grid_level_count() == 0) {
        diags.push_back(
            make_warning(Phase::semantic, 1, 1, codes::empty_levels, "game has no grid levels"));
    }

    sort_diagnostics(diags);
    if (!has_errors(diags)) result.game = std::move(game);
    return result;
}

}  // namespace pskit
