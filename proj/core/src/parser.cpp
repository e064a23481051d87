#include "pskit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include "pskit/colors.hpp"

namespace pskit {
namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

struct Tok {
    std::string text;
    std::string lower;
    int col = 1;  // 1-based
};

Tok make_tok(std::string text, int col) {
    Tok t;
    t.lower = to_lower(text);
    t.text = std::move(text);
    t.col = col;
    return t;
}

/// Whitespace-separated words (prelude, objects, win conditions).
std::vector<Tok> split_words(const std::string& line) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back(make_tok(line.substr(start, i - start), static_cast<int>(start) + 1));
    }
    return out;
}

/// Rule tokenizer: brackets, pipes, arrows, motion markers and ellipses
/// become standalone tokens without requiring surrounding spaces.
std::vector<Tok> split_rule(const std::string& line) {
    std::vector<Tok> out;
    size_t i = 0;
    auto push1 = [&](size_t start, size_t len) {
        out.push_back(make_tok(line.substr(start, len), static_cast<int>(start) + 1));
    };
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') { push1(i, 2); i += 2; continue; }
        if (c == '.') {
            size_t start = i;
            while (i < line.size() && line[i] == '.') ++i;
            push1(start, i - start);
            continue;
        }
        if (c == '[' || c == ']' || c == '|' || c == '>' || c == '<' || c == '^') {
            push1(i, 1);
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            size_t start = i;
            while (i < line.size() && is_word_char(line[i])) ++i;
            push1(start, i - start);
            continue;
        }
        push1(i, 1);
        ++i;
    }
    return out;
}

/// Legend tokenizer: '=' is a standalone token.
std::vector<Tok> split_legend(const std::string& line) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '=') {
            out.push_back(make_tok("=", static_cast<int>(i) + 1));
            ++i;
            continue;
        }
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '=') ++i;
        out.push_back(make_tok(line.substr(start, i - start), static_cast<int>(start) + 1));
    }
    return out;
}

/// Layer tokenizer: commas separate, otherwise words.
std::vector<Tok> split_layer(const std::string& line) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') { ++i; continue; }
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ',') ++i;
        out.push_back(make_tok(line.substr(start, i - start), static_cast<int>(start) + 1));
    }
    return out;
}

std::string rtrim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool is_delimiter_line(const std::string& s) {
    std::string t = rtrim(s);
    size_t i = 0;
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    size_t eq = 0;
    for (; i < t.size(); ++i, ++eq)
        if (t[i] != '=') return false;
    return eq >= 2;
}

/// Replaces `( ... )` comments (nestable) with spaces so positions survive.
/// A UTF-8 BOM is blanked too.
std::string blank_comments(std::string src) {
    if (src.size() >= 3 && static_cast<unsigned char>(src[0]) == 0xEF &&
        static_cast<unsigned char>(src[1]) == 0xBB && static_cast<unsigned char>(src[2]) == 0xBF) {
        src[0] = src[1] = src[2] = ' ';
    }
    int depth = 0;
    for (char& c : src) {
        if (c == '(') {
            ++depth;
            c = ' ';
        } else if (c == ')' && depth > 0) {
            --depth;
            c = ' ';
        } else if (depth > 0 && c != '\n') {
            c = ' ';
        }
    }
    return src;
}

const std::set<std::string, std::less<>> kSupportedPrelude = {
    "title", "author", "homepage", "background_color", "text_color",
    "run_rules_on_level_start", "again_interval", "norepeat_action",
};

// Full-language prelude options outside the supported subset; stored and
// rejected at compile time rather than misparsed.
const std::set<std::string, std::less<>> kKnownUnsupportedPrelude = {
    "realtime_interval", "key_repeat_interval", "noaction", "noundo", "norestart",
    "require_player_movement", "throttle_movement", "flickscreen", "zoomscreen",
    "color_palette", "youtube", "debug", "verbose_logging", "scanline",
};

struct LineRec {
    int number = 1;
    std::string text;
    enum class Kind { blank, delimiter, header, content } kind = Kind::content;
    Section header_section = Section::prelude;
};

class Parser {
public:
    explicit Parser(const SourceText& src) : origin_(src.origin) {
        std::string cleaned = blank_comments(src.content);
        size_t start = 0;
        int line_no = 1;
        while (start <= cleaned.size()) {
            size_t end = cleaned.find('\n', start);
            std::string text = cleaned.substr(
                start, end == std::string::npos ? std::string::npos : end - start);
            lines_.push_back(LineRec{line_no++, rtrim(std::move(text))});
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }

    ParseResult run() {
        classify_lines();
        assign_sections();
        finish_levels();
        sort_diagnostics(diagnostics_);
        ParseResult result;
        result.diagnostics = std::move(diagnostics_);
        if (count_syntax_errors(result.diagnostics) == 0) result.spec = std::move(spec_);
        return result;
    }

private:
    void error(int line, int col, std::string_view code, std::string msg) {
        diagnostics_.push_back(make_error(Phase::syntax, line, col, code, std::move(msg)));
    }

    void classify_lines() {
        for (auto& l : lines_) {
            if (is_blank(l.text)) {
                l.kind = LineRec::Kind::blank;
            } else if (is_delimiter_line(l.text)) {
                l.kind = LineRec::Kind::delimiter;
            } else {
                auto words = split_words(l.text);
                if (words.size() == 1) {
                    if (auto s = section_from_name(words[0].lower)) {
                        l.kind = LineRec::Kind::header;
                        l.header_section = *s;
                        continue;
                    }
                }
                l.kind = LineRec::Kind::content;
            }
        }
        // delimiters must hug headers; headers must be hugged by delimiters
        auto neighbor = [&](size_t idx, int dir) -> const LineRec* {
            for (size_t j = idx;;) {
                if (dir < 0 && j == 0) return nullptr;
                j = static_cast<size_t>(static_cast<long>(j) + dir);
                if (j >= lines_.size()) return nullptr;
                if (lines_[j].kind != LineRec::Kind::blank) return &lines_[j];
            }
        };
        for (size_t i = 0; i < lines_.size(); ++i) {
            const auto& l = lines_[i];
            if (l.kind == LineRec::Kind::header) {
                const LineRec* prev = neighbor(i, -1);
                const LineRec* next = neighbor(i, +1);
                bool before = prev && prev->kind == LineRec::Kind::delimiter;
                bool after = next && next->kind == LineRec::Kind::delimiter;
                if (!before || !after) {
                    error(l.number, 1, codes::missing_section_delimiter,
                          "section header '" + l.text + "' must sit between ==== delimiter lines");
                }
            } else if (l.kind == LineRec::Kind::delimiter) {
                const LineRec* prev = neighbor(i, -1);
                const LineRec* next = neighbor(i, +1);
                bool adjacent = (prev && prev->kind == LineRec::Kind::header) ||
                                (next && next->kind == LineRec::Kind::header);
                if (!adjacent) {
                    error(l.number, 1, codes::stray_delimiter,
                          "delimiter line is not attached to a section header");
                }
            }
        }
    }

    void assign_sections() {
        Section current = Section::prelude;
        std::set<Section> seen;
        for (const auto& l : lines_) {
            switch (l.kind) {
                case LineRec::Kind::blank:
                    if (current == Section::levels) close_level_block();
                    break;
                case LineRec::Kind::delimiter:
                    break;
                case LineRec::Kind::header:
                    if (current == Section::levels) close_level_block();
                    finish_object();
                    if (!seen.insert(l.header_section).second) {
                        error(l.number, 1, codes::duplicate_section,
                              "duplicate section '" + l.text + "'");
                    }
                    current = l.header_section;
                    break;
                case LineRec::Kind::content:
                    dispatch(current, l);
                    break;
            }
        }
    }

    void dispatch(Section s, const LineRec& l) {
        switch (s) {
            case Section::prelude: parse_prelude_line(l); break;
            case Section::objects: parse_object_line(l); break;
            case Section::legend: parse_legend_line(l); break;
            case Section::sounds: spec_.sounds.push_back(l.text); break;
            case Section::collisionlayers: parse_layer_line(l); break;
            case Section::rules: parse_rule_line(l); break;
            case Section::winconditions: parse_win_line(l); break;
            case Section::levels: parse_level_line(l); break;
        }
    }

    // ---- prelude ----

    void parse_prelude_line(const LineRec& l) {
        auto words = split_words(l.text);
        if (words.empty()) return;
        const std::string& key = words[0].lower;
        if (kSupportedPrelude.count(key) == 0 && kKnownUnsupportedPrelude.count(key) == 0) {
            error(l.number, words[0].col, codes::unknown_prelude_key,
                  "unknown prelude setting '" + words[0].text + "'");
            return;
        }
        std::string value;
        if (words.size() > 1) {
            size_t off = static_cast<size_t>(words[1].col) - 1;
            value = rtrim(l.text.substr(off));
        }
        spec_.prelude.emplace_back(key, value);
    }

    // ---- objects ----

    enum class ObjState { name, colors, sprite };
    ObjState object_state_ = ObjState::name;

    bool looks_like_sprite_row(const std::string& text) {
        auto words = split_words(text);
        if (words.size() != 1) return false;
        return std::all_of(words[0].text.begin(), words[0].text.end(),
                           [](char c) { return c == '.' || (c >= '0' && c <= '9'); });
    }

    void parse_object_line(const LineRec& l) {
        if (object_state_ == ObjState::name) {
            parse_object_name(l);
            return;
        }
        if (object_state_ == ObjState::colors) {
            parse_object_colors(l);
            return;
        }
        // sprite rows run until a non-row line starts the next object
        if (looks_like_sprite_row(l.text)) {
            parse_sprite_row(l);
        } else {
            finish_object();
            parse_object_name(l);
        }
    }

    void parse_object_name(const LineRec& l) {
        auto words = split_words(l.text);
        if (words.empty()) return;
        if (!is_identifier(words[0].text)) {
            error(l.number, words[0].col, codes::invalid_object,
                  "expected an object name, got '" + words[0].text + "'");
            return;
        }
        ObjectDef def;
        def.name = words[0].text;
        def.line = l.number;
        // `Name G` declares a one-character legend alias inline
        if (words.size() == 2 && words[1].text.size() == 1) {
            LegendEntry alias;
            alias.glyph = words[1].text;
            alias.kind = LegendKind::alias;
            alias.members = {def.name};
            alias.line = l.number;
            spec_.legend.push_back(std::move(alias));
        } else if (words.size() > 1) {
            error(l.number, words[1].col, codes::invalid_object,
                  "unexpected tokens after object name '" + def.name + "'");
            return;
        }
        spec_.objects.push_back(std::move(def));
        object_state_ = ObjState::colors;
    }

    void parse_object_colors(const LineRec& l) {
        auto words = split_words(l.text);
        ObjectDef& def = spec_.objects.back();
        for (const auto& w : words) {
            auto c = parse_color(w.text);
            if (!c) {
                error(l.number, w.col, codes::invalid_color,
                      "'" + w.text + "' is not a color name or #hex value");
                continue;
            }
            def.colors.push_back(std::move(*c));
        }
        if (def.colors.empty()) {
            error(l.number, 1, codes::invalid_color, "object '" + def.name + "' has no valid colors");
            def.colors.push_back(*parse_color("black"));  // keep invariants intact
        } else if (def.colors.size() > 10) {
            error(l.number, 1, codes::invalid_color,
                  "object '" + def.name + "' has more than 10 colors");
            def.colors.resize(10);
        }
        sprite_rows_ = 0;
        sprite_line_ = l.number;
        object_state_ = ObjState::sprite;
    }

    int sprite_rows_ = 0;
    int sprite_line_ = 0;

    void parse_sprite_row(const LineRec& l) {
        ObjectDef& def = spec_.objects.back();
        auto words = split_words(l.text);
        const std::string& row = words[0].text;
        if (sprite_rows_ == 0) def.sprite.solid = false;
        if (sprite_rows_ >= 5) {
            error(l.number, words[0].col, codes::invalid_sprite,
                  "sprite of '" + def.name + "' has more than 5 rows");
            return;
        }
        if (row.size() != 5) {
            error(l.number, words[0].col, codes::invalid_sprite,
                  "sprite row must be exactly 5 cells, got " + std::to_string(row.size()));
        }
        for (size_t x = 0; x < 5 && x < row.size(); ++x) {
            char c = row[x];
            if (c == '.') {
                def.sprite.cells[sprite_rows_][x] = -1;
            } else {
                int idx = c - '0';
                if (idx >= static_cast<int>(def.colors.size())) {
                    error(l.number, words[0].col + static_cast<int>(x), codes::invalid_sprite,
                          "sprite palette index " + std::to_string(idx) + " out of range for '" +
                              def.name + "'");
                    idx = 0;
                }
                def.sprite.cells[sprite_rows_][x] = static_cast<int8_t>(idx);
            }
        }
        ++sprite_rows_;
        sprite_line_ = l.number;
    }

    void finish_object() {
        if (object_state_ == ObjState::colors && !spec_.objects.empty() &&
            spec_.objects.back().colors.empty()) {
            error(spec_.objects.back().line, 1, codes::invalid_color,
                  "object '" + spec_.objects.back().name + "' has no color line");
            spec_.objects.back().colors.push_back(*parse_color("black"));
        }
        if (object_state_ == ObjState::sprite && sprite_rows_ != 0 && sprite_rows_ != 5 &&
            !spec_.objects.empty()) {
            error(sprite_line_, 1, codes::invalid_sprite,
                  "sprite of '" + spec_.objects.back().name + "' has " +
                      std::to_string(sprite_rows_) + " rows, expected 5");
            spec_.objects.back().sprite.solid = true;  // fall back to a solid block
        }
        sprite_rows_ = 0;
        object_state_ = ObjState::name;
    }

    // ---- legend ----

    void parse_legend_line(const LineRec& l) {
        auto toks = split_legend(l.text);
        if (toks.empty()) return;
        if (toks.size() < 3 || toks[1].text != "=") {
            error(l.number, toks[0].col, codes::invalid_legend,
                  "legend entries look like `glyph = Object [and|or Object ...]`");
            return;
        }
        LegendEntry entry;
        entry.glyph = toks[0].text;
        entry.line = l.number;
        if (entry.glyph.size() > 1 && !is_identifier(entry.glyph)) {
            error(l.number, toks[0].col, codes::invalid_legend,
                  "legend glyph must be a single character or an identifier");
            return;
        }
        bool expecting_member = true;
        std::optional<bool> is_and;  // unset until first connective
        for (size_t i = 2; i < toks.size(); ++i) {
            const Tok& t = toks[i];
            if (expecting_member) {
                entry.members.push_back(t.text);
                expecting_member = false;
            } else if (t.lower == "and" || t.lower == "or") {
                bool this_and = t.lower == "and";
                if (is_and && *is_and != this_and) {
                    error(l.number, t.col, codes::invalid_legend,
                          "legend entry mixes 'and' with 'or'");
                    return;
                }
                is_and = this_and;
                expecting_member = true;
            } else {
                error(l.number, t.col, codes::invalid_legend,
                      "expected 'and' or 'or', got '" + t.text + "'");
                return;
            }
        }
        if (expecting_member) {
            error(l.number, toks.back().col, codes::invalid_legend,
                  "legend entry ends with a dangling connective");
            return;
        }
        if (entry.members.size() == 1) {
            entry.kind = LegendKind::alias;
        } else {
            entry.kind = *is_and ? LegendKind::aggregate : LegendKind::property;
        }
        spec_.legend.push_back(std::move(entry));
    }

    // ---- collision layers ----

    void parse_layer_line(const LineRec& l) {
        auto toks = split_layer(l.text);
        if (toks.empty()) return;
        std::vector<std::string> members;
        for (const auto& t : toks) {
            if (!is_identifier(t.text)) {
                error(l.number, t.col, codes::invalid_layer,
                      "collision layer entries must be object or legend names, got '" + t.text + "'");
                continue;
            }
            members.push_back(t.text);
        }
        if (!members.empty()) spec_.collision_layers.push_back(std::move(members));
    }

    // ---- rules ----

    static std::optional<DirConstraint> rule_direction(const std::string& lower) {
        if (lower == "up") return DirConstraint::up;
        if (lower == "down") return DirConstraint::down;
        if (lower == "left") return DirConstraint::left;
        if (lower == "right") return DirConstraint::right;
        if (lower == "horizontal") return DirConstraint::horizontal;
        if (lower == "vertical") return DirConstraint::vertical;
        if (lower == "orthogonal") return DirConstraint::orthogonal;
        if (lower == "perpendicular") return DirConstraint::perpendicular;
        if (lower == "parallel") return DirConstraint::parallel;
        return std::nullopt;
    }

    static std::optional<Motion> atom_motion(const std::string& lower) {
        if (lower == ">") return Motion::rel_fwd;
        if (lower == "<") return Motion::rel_back;
        if (lower == "^") return Motion::rel_up;
        if (lower == "v") return Motion::rel_down;
        if (lower == "up") return Motion::abs_up;
        if (lower == "down") return Motion::abs_down;
        if (lower == "left") return Motion::abs_left;
        if (lower == "right") return Motion::abs_right;
        if (lower == "moving") return Motion::moving;
        if (lower == "stationary") return Motion::stationary;
        if (lower == "action") return Motion::action;
        if (lower == "randomdir") return Motion::randomdir;
        return std::nullopt;
    }

    static bool is_command_word(const std::string& lower) {
        if (lower == "cancel" || lower == "win" || lower == "again" || lower == "checkpoint" ||
            lower == "restart" || lower == "message")
            return true;
        if (lower.rfind("sfx", 0) == 0 && lower.size() > 3) {
            return std::all_of(lower.begin() + 3, lower.end(),
                               [](char c) { return c >= '0' && c <= '9'; });
        }
        return false;
    }

    void parse_rule_line(const LineRec& l) {
        auto toks = split_rule(l.text);
        if (toks.empty()) return;
        if (toks.size() == 1 && (toks[0].lower == "startloop" || toks[0].lower == "endloop")) {
            spec_.unsupported_lines.emplace_back(l.number, toks[0].lower);
            return;
        }

        RuleDef rule;
        rule.line = l.number;
        size_t i = 0;

        // prefixes
        for (; i < toks.size() && toks[i].text != "["; ++i) {
            const Tok& t = toks[i];
            if (t.text == "+" && i == 0) {
                rule.plus_grouped = true;
            } else if (t.lower == "late") {
                rule.late = true;
            } else if (t.lower == "random") {
                rule.random = true;
            } else if (t.lower == "rigid") {
                rule.rigid = true;
            } else if (auto d = rule_direction(t.lower)) {
                rule.dir = *d;
            } else {
                error(l.number, t.col, codes::invalid_rule,
                      "unexpected token '" + t.text + "' before rule pattern");
                return;
            }
        }

        bool ok = true;
        auto lhs = parse_brackets(toks, i, l.number, ok);
        if (!ok) return;
        rule.lhs = std::move(lhs);
        if (rule.lhs.empty()) {
            error(l.number, toks.empty() ? 1 : toks[0].col, codes::invalid_rule,
                  "rule has no left-hand pattern");
            return;
        }

        if (i >= toks.size() || toks[i].text != "->") {
            error(l.number, i < toks.size() ? toks[i].col : toks.back().col, codes::invalid_rule,
                  "expected '->' after the rule's left-hand side");
            return;
        }
        ++i;

        auto rhs = parse_brackets(toks, i, l.number, ok);
        if (!ok) return;
        rule.rhs = std::move(rhs);

        // trailing commands
        while (i < toks.size()) {
            const Tok& t = toks[i];
            if (!is_command_word(t.lower)) {
                error(l.number, t.col, codes::invalid_rule,
                      "unexpected token '" + t.text + "' after rule");
                return;
            }
            if (t.lower == "message") {
                size_t off = static_cast<size_t>(t.col) - 1 + t.text.size();
                std::string text = l.text.size() > off ? l.text.substr(off) : "";
                while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
                    text.erase(text.begin());
                rule.commands.push_back(Command{CommandKind::message, rtrim(std::move(text))});
                i = toks.size();
                break;
            }
            CommandKind kind = CommandKind::sfx;
            if (t.lower == "cancel") kind = CommandKind::cancel;
            else if (t.lower == "win") kind = CommandKind::win;
            else if (t.lower == "again") kind = CommandKind::again;
            else if (t.lower == "checkpoint") kind = CommandKind::checkpoint;
            else if (t.lower == "restart") kind = CommandKind::restart;
            rule.commands.push_back(Command{kind, kind == CommandKind::sfx ? t.lower : ""});
            ++i;
        }

        if (!check_rule_shape(rule, l.number)) return;
        spec_.rules.push_back(std::move(rule));
    }

    std::vector<BracketPattern> parse_brackets(const std::vector<Tok>& toks, size_t& i, int line,
                                               bool& ok) {
        std::vector<BracketPattern> out;
        ok = true;
        while (i < toks.size() && toks[i].text == "[") {
            int open_col = toks[i].col;
            ++i;
            BracketPattern bracket;
            CellPattern cell;
            bool cell_is_ellipsis = false;
            auto close_cell = [&]() {
                if (cell_is_ellipsis) {
                    bracket.ellipsis_before.push_back(static_cast<int>(bracket.cells.size()));
                } else {
                    bracket.cells.push_back(std::move(cell));
                }
                cell = CellPattern{};
                cell_is_ellipsis = false;
            };
            bool closed = false;
            while (i < toks.size()) {
                const Tok& t = toks[i];
                if (t.text == "]") {
                    close_cell();
                    closed = true;
                    ++i;
                    break;
                }
                if (t.text == "|") {
                    close_cell();
                    ++i;
                    continue;
                }
                if (t.text == "...") {
                    if (!cell.atoms.empty() || cell_is_ellipsis) {
                        error(line, t.col, codes::invalid_ellipsis,
                              "'...' must occupy a cell of its own");
                        ok = false;
                        return out;
                    }
                    cell_is_ellipsis = true;
                    ++i;
                    continue;
                }
                // atom: [no] [motion] entity
                Atom atom;
                size_t before = i;
                if (t.lower == "no") {
                    atom.negated = true;
                    ++i;
                }
                if (i < toks.size()) {
                    if (auto m = atom_motion(toks[i].lower)) {
                        // motion keywords double as object names when no
                        // entity follows in this cell
                        bool entity_follows =
                            i + 1 < toks.size() && toks[i + 1].text != "]" &&
                            toks[i + 1].text != "|" && toks[i + 1].text != "...";
                        if (entity_follows || toks[i].text.size() == 1) {
                            atom.motion = *m;
                            ++i;
                        }
                    }
                }
                if (i >= toks.size() || toks[i].text == "]" || toks[i].text == "|" ||
                    toks[i].text == "...") {
                    error(line, toks[before].col, codes::invalid_rule,
                          "expected an object name in rule cell");
                    ok = false;
                    return out;
                }
                if (!is_identifier(toks[i].text)) {
                    error(line, toks[i].col, codes::invalid_rule,
                          "'" + toks[i].text + "' is not a valid object reference");
                    ok = false;
                    return out;
                }
                atom.entity = toks[i].text;
                ++i;
                cell.atoms.push_back(std::move(atom));
            }
            if (!closed) {
                error(line, open_col, codes::invalid_rule, "unterminated '[' pattern");
                ok = false;
                return out;
            }
            // ellipsis shape checks
            const auto& ell = bracket.ellipsis_before;
            for (size_t k = 1; k < ell.size(); ++k) {
                if (ell[k] == ell[k - 1]) {
                    error(line, open_col, codes::invalid_ellipsis, "adjacent '...' in bracket");
                    ok = false;
                    return out;
                }
            }
            if (bracket.cells.empty() && !ell.empty()) {
                error(line, open_col, codes::invalid_ellipsis,
                      "'...' cannot be the only content of a bracket");
                ok = false;
                return out;
            }
            if (bracket.cells.empty()) {
                // `[]` — treat as a single wildcard cell
                bracket.cells.push_back(CellPattern{});
            }
            out.push_back(std::move(bracket));
        }
        return out;
    }

    bool check_rule_shape(const RuleDef& rule, int line) {
        if (rule.rhs.empty()) return true;
        if (rule.rhs.size() != rule.lhs.size()) {
            error(line, 1, codes::rule_arity_mismatch,
                  "rule has " + std::to_string(rule.lhs.size()) + " pattern(s) on the left but " +
                      std::to_string(rule.rhs.size()) + " on the right");
            return false;
        }
        for (size_t b = 0; b < rule.lhs.size(); ++b) {
            if (rule.lhs[b].cells.size() != rule.rhs[b].cells.size()) {
                error(line, 1, codes::rule_arity_mismatch,
                      "bracket " + std::to_string(b + 1) + " has " +
                          std::to_string(rule.lhs[b].cells.size()) + " cell(s) on the left but " +
                          std::to_string(rule.rhs[b].cells.size()) + " on the right");
                return false;
            }
            if (rule.lhs[b].ellipsis_before != rule.rhs[b].ellipsis_before) {
                error(line, 1, codes::rule_arity_mismatch,
                      "'...' positions differ between the sides of bracket " + std::to_string(b + 1));
                return false;
            }
        }
        return true;
    }

    // ---- win conditions ----

    void parse_win_line(const LineRec& l) {
        auto words = split_words(l.text);
        if (words.empty()) return;
        WinCondition wc;
        wc.line = l.number;
        const std::string& q = words[0].lower;
        if (q == "all") wc.quantifier = WinQuantifier::all;
        else if (q == "some" || q == "any") wc.quantifier = WinQuantifier::some;
        else if (q == "no") wc.quantifier = WinQuantifier::none;
        else {
            error(l.number, words[0].col, codes::invalid_win_condition,
                  "win conditions start with all, some, or no");
            return;
        }
        if (words.size() < 2 || !is_identifier(words[1].text)) {
            error(l.number, words.size() < 2 ? words[0].col : words[1].col,
                  codes::invalid_win_condition, "expected an object name");
            return;
        }
        wc.subject = words[1].text;
        if (words.size() == 2) {
            if (wc.quantifier == WinQuantifier::all) {
                error(l.number, words[0].col, codes::invalid_win_condition,
                      "'all X' needs an 'on Y' clause");
                return;
            }
        } else if (words.size() == 4 && words[2].lower == "on" && is_identifier(words[3].text)) {
            wc.on_target = words[3].text;
        } else {
            error(l.number, words[2].col, codes::invalid_win_condition,
                  "expected `on <object>` after '" + wc.subject + "'");
            return;
        }
        spec_.win_conditions.push_back(std::move(wc));
    }

    // ---- levels ----

    std::vector<std::pair<int, std::string>> level_rows_;  // (line, row)

    void parse_level_line(const LineRec& l) {
        auto words = split_words(l.text);
        if (!words.empty() && words[0].lower == "message") {
            close_level_block();
            size_t off = static_cast<size_t>(words[0].col) - 1 + words[0].text.size();
            std::string text = l.text.size() > off ? l.text.substr(off) : "";
            while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
                text.erase(text.begin());
            LevelEntry e;
            e.is_message = true;
            e.message = rtrim(std::move(text));
            e.line = l.number;
            spec_.levels.push_back(std::move(e));
            return;
        }
        if (words.size() != 1) {
            error(l.number, words.size() > 1 ? words[1].col : 1, codes::invalid_level_line,
                  "level rows cannot contain spaces");
            return;
        }
        level_rows_.emplace_back(l.number, words[0].text);
    }

    void close_level_block() {
        if (level_rows_.empty()) return;
        LevelEntry e;
        e.line = level_rows_.front().first;
        size_t width = level_rows_.front().second.size();
        for (size_t r = 0; r < level_rows_.size(); ++r) {
            if (level_rows_[r].second.size() != width) {
                error(level_rows_[r].first, 1, codes::ragged_level,
                      "level row " + std::to_string(r + 1) + " has " +
                          std::to_string(level_rows_[r].second.size()) + " cells, expected " +
                          std::to_string(width));
            }
            e.rows.push_back(level_rows_[r].second);
        }
        spec_.levels.push_back(std::move(e));
        level_rows_.clear();
    }

    void finish_levels() {
        close_level_block();
        finish_object();
    }

    std::string origin_;
    std::vector<LineRec> lines_;
    std::vector<Diagnostic> diagnostics_;
    GameSpec spec_;
};

}  // namespace

const char* section_name(Section s) {
    switch (s) {
        case Section::prelude: return "PRELUDE";
        case Section::objects: return "OBJECTS";
        case Section::legend: return "LEGEND";
        case Section::sounds: return "SOUNDS";
        case Section::collisionlayers: return "COLLISIONLAYERS";
        case Section::rules: return "RULES";
        case Section::winconditions: return "WINCONDITIONS";
        case Section::levels: return "LEVELS";
    }
    return "?";
}

std::optional<Section> section_from_name(std::string_view word) {
    std::string low = to_lower(word);
    if (low == "objects") return Section::objects;
    if (low == "legend") return Section::legend;
    if (low == "sounds") return Section::sounds;
    if (low == "collisionlayers") return Section::collisionlayers;
    if (low == "rules") return Section::rules;
    if (low == "winconditions") return Section::winconditions;
    if (low == "levels") return Section::levels;
    return std::nullopt;
}

ParseResult parse_game(const SourceText& source) {
    Parser parser(source);
    return parser.run();
}

}  // namespace pskit
