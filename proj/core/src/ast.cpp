#include "pskit/ast.hpp"

#include <cctype>

namespace pskit {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

namespace {

bool ieq(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

bool ieq_list(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!ieq(a[i], b[i])) return false;
    return true;
}

bool atoms_equal(const Atom& a, const Atom& b) {
    return a.negated == b.negated && a.motion == b.motion && ieq(a.entity, b.entity);
}

bool brackets_equal(const BracketPattern& a, const BracketPattern& b) {
    if (a.ellipsis_before != b.ellipsis_before) return false;
    if (a.cells.size() != b.cells.size()) return false;
    for (size_t i = 0; i < a.cells.size(); ++i) {
        if (a.cells[i].atoms.size() != b.cells[i].atoms.size()) return false;
        for (size_t j = 0; j < a.cells[i].atoms.size(); ++j)
            if (!atoms_equal(a.cells[i].atoms[j], b.cells[i].atoms[j])) return false;
    }
    return true;
}

bool rules_equal(const RuleDef& a, const RuleDef& b) {
    if (a.late != b.late || a.random != b.random || a.rigid != b.rigid || a.dir != b.dir ||
        a.plus_grouped != b.plus_grouped || a.commands != b.commands)
        return false;
    auto sides_equal = [](const std::vector<BracketPattern>& x, const std::vector<BracketPattern>& y) {
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); ++i)
            if (!brackets_equal(x[i], y[i])) return false;
        return true;
    };
    return sides_equal(a.lhs, b.lhs) && sides_equal(a.rhs, b.rhs);
}

}  // namespace

bool structurally_equal(const GameSpec& a, const GameSpec& b) {
    if (a.prelude != b.prelude) return false;

    if (a.objects.size() != b.objects.size()) return false;
    for (size_t i = 0; i < a.objects.size(); ++i) {
        const auto& x = a.objects[i];
        const auto& y = b.objects[i];
        if (!ieq(x.name, y.name) || x.colors != y.colors || !(x.sprite == y.sprite)) return false;
    }

    if (a.legend.size() != b.legend.size()) return false;
    for (size_t i = 0; i < a.legend.size(); ++i) {
        const auto& x = a.legend[i];
        const auto& y = b.legend[i];
        if (!ieq(x.glyph, y.glyph) || x.kind != y.kind || !ieq_list(x.members, y.members))
            return false;
    }

    if (a.sounds != b.sounds) return false;

    if (a.collision_layers.size() != b.collision_layers.size()) return false;
    for (size_t i = 0; i < a.collision_layers.size(); ++i)
        if (!ieq_list(a.collision_layers[i], b.collision_layers[i])) return false;

    if (a.rules.size() != b.rules.size()) return false;
    for (size_t i = 0; i < a.rules.size(); ++i)
        if (!rules_equal(a.rules[i], b.rules[i])) return false;

    if (a.win_conditions.size() != b.win_conditions.size()) return false;
    for (size_t i = 0; i < a.win_conditions.size(); ++i) {
        const auto& x = a.win_conditions[i];
        const auto& y = b.win_conditions[i];
        if (x.quantifier != y.quantifier || !ieq(x.subject, y.subject)) return false;
        if (x.on_target.has_value() != y.on_target.has_value()) return false;
        if (x.on_target && !ieq(*x.on_target, *y.on_target)) return false;
    }

    if (a.levels.size() != b.levels.size()) return false;
    for (size_t i = 0; i < a.levels.size(); ++i) {
        const auto& x = a.levels[i];
        const auto& y = b.levels[i];
        if (x.is_message != y.is_message || x.message != y.message) return false;
        if (!ieq_list(x.rows, y.rows)) return false;
    }

    return a.unsupported_lines.size() == b.unsupported_lines.size();
}

}  // namespace pskit
