#include "pskit/printer.hpp"

#include <sstream>

namespace pskit {
namespace {

const char* motion_word(Motion m) {
    switch (m) {
        case Motion::none: return "";
        case Motion::rel_fwd: return ">";
        case Motion::rel_back: return "<";
        case Motion::rel_up: return "^";
        case Motion::rel_down: return "v";
        case Motion::abs_up: return "up";
        case Motion::abs_down: return "down";
        case Motion::abs_left: return "left";
        case Motion::abs_right: return "right";
        case Motion::moving: return "moving";
        case Motion::stationary: return "stationary";
        case Motion::action: return "action";
        case Motion::randomdir: return "randomdir";
    }
    return "";
}

const char* dir_word(DirConstraint d) {
    switch (d) {
        case DirConstraint::none: return "";
        case DirConstraint::up: return "up";
        case DirConstraint::down: return "down";
        case DirConstraint::left: return "left";
        case DirConstraint::right: return "right";
        case DirConstraint::horizontal: return "horizontal";
        case DirConstraint::vertical: return "vertical";
        case DirConstraint::orthogonal: return "orthogonal";
        case DirConstraint::perpendicular: return "perpendicular";
        case DirConstraint::parallel: return "parallel";
    }
    return "";
}

void print_bracket(std::ostringstream& os, const BracketPattern& b) {
    std::vector<std::string> elems;
    size_t ell = 0;
    for (size_t i = 0; i <= b.cells.size(); ++i) {
        while (ell < b.ellipsis_before.size() &&
               b.ellipsis_before[ell] == static_cast<int>(i)) {
            elems.emplace_back("...");
            ++ell;
        }
        if (i == b.cells.size()) break;
        std::string cell_text;
        for (const auto& atom : b.cells[i].atoms) {
            if (!cell_text.empty()) cell_text += ' ';
            if (atom.negated) cell_text += "no ";
            if (atom.motion != Motion::none) {
                cell_text += motion_word(atom.motion);
                cell_text += ' ';
            }
            cell_text += atom.entity;
        }
        elems.push_back(std::move(cell_text));
    }
    os << "[ ";
    for (size_t i = 0; i < elems.size(); ++i) {
        if (i) os << " | ";
        os << elems[i];
    }
    os << " ]";
}

void print_rule(std::ostringstream& os, const RuleDef& r) {
    if (r.plus_grouped) os << "+ ";
    if (r.late) os << "late ";
    if (r.rigid) os << "rigid ";
    if (r.random) os << "random ";
    if (r.dir != DirConstraint::none) os << dir_word(r.dir) << ' ';
    for (size_t i = 0; i < r.lhs.size(); ++i) {
        print_bracket(os, r.lhs[i]);
        os << ' ';
    }
    os << "->";
    for (const auto& b : r.rhs) {
        os << ' ';
        print_bracket(os, b);
    }
    for (const auto& c : r.commands) {
        os << ' ';
        switch (c.kind) {
            case CommandKind::cancel: os << "cancel"; break;
            case CommandKind::win: os << "win"; break;
            case CommandKind::again: os << "again"; break;
            case CommandKind::checkpoint: os << "checkpoint"; break;
            case CommandKind::restart: os << "restart"; break;
            case CommandKind::sfx: os << c.text; break;
            case CommandKind::message:
                os << "message";
                if (!c.text.empty()) os << ' ' << c.text;
                break;
        }
    }
    os << '\n';
}

void header(std::ostringstream& os, const char* name) {
    os << "========\n" << name << "\n========\n\n";
}

}  // namespace

SourceText print_game(const GameSpec& spec, std::string origin) {
    std::ostringstream os;

    for (const auto& [key, value] : spec.prelude) {
        os << key;
        if (!value.empty()) os << ' ' << value;
        os << '\n';
    }
    if (!spec.prelude.empty()) os << '\n';

    header(os, "OBJECTS");
    for (const auto& obj : spec.objects) {
        os << obj.name << '\n';
        for (size_t i = 0; i < obj.colors.size(); ++i)
            os << (i ? " " : "") << obj.colors[i].spelling;
        os << '\n';
        if (!obj.sprite.solid) {
            for (const auto& row : obj.sprite.cells) {
                for (int8_t c : row) os << (c < 0 ? '.' : static_cast<char>('0' + c));
                os << '\n';
            }
        }
        os << '\n';
    }

    header(os, "LEGEND");
    for (const auto& e : spec.legend) {
        os << e.glyph << " = ";
        const char* joiner = e.kind == LegendKind::aggregate ? " and " : " or ";
        for (size_t i = 0; i < e.members.size(); ++i) {
            if (i) os << joiner;
            os << e.members[i];
        }
        os << '\n';
    }
    os << '\n';

    header(os, "SOUNDS");
    for (const auto& s : spec.sounds) os << s << '\n';
    os << '\n';

    header(os, "COLLISIONLAYERS");
    for (const auto& layer : spec.collision_layers) {
        for (size_t i = 0; i < layer.size(); ++i) os << (i ? ", " : "") << layer[i];
        os << '\n';
    }
    os << '\n';

    header(os, "RULES");
    for (const auto& r : spec.rules) print_rule(os, r);
    os << '\n';

    header(os, "WINCONDITIONS");
    for (const auto& w : spec.win_conditions) {
        switch (w.quantifier) {
            case WinQuantifier::all: os << "all"; break;
            case WinQuantifier::some: os << "some"; break;
            case WinQuantifier::none: os << "no"; break;
        }
        os << ' ' << w.subject;
        if (w.on_target) os << " on " << *w.on_target;
        os << '\n';
    }
    os << '\n';

    header(os, "LEVELS");
    bool first = true;
    for (const auto& lvl : spec.levels) {
        if (!first) os << '\n';
        first = false;
        if (lvl.is_message) {
            os << "message";
            if (!lvl.message.empty()) os << ' ' << lvl.message;
            os << '\n';
        } else {
            for (const auto& row : lvl.rows) os << row << '\n';
        }
    }

    return SourceText{os.str(), std::move(origin)};
}

}  // namespace pskit
