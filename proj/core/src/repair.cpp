#include "pskit/repair.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "pskit/parser.hpp"

namespace pskit {
namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        out += lines[i];
        if (i + 1 < lines.size()) out += '\n';
    }
    return out;
}

std::string strip_comments_line(const std::string& line, int& depth) {
    std::string out = line;
    for (char& c : out) {
        if (c == '(') {
            ++depth;
            c = ' ';
        } else if (c == ')' && depth > 0) {
            --depth;
            c = ' ';
        } else if (depth > 0) {
            c = ' ';
        }
    }
    return out;
}

bool blank_line(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool delimiter_line(const std::string& s) {
    size_t eq = 0;
    for (char c : s) {
        if (c == '=') ++eq;
        else if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return eq >= 2;
}

std::string trimmed(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct LineInfo {
    enum class Kind { blank, delimiter, header, content } kind = Kind::content;
    Section section = Section::prelude;        // active section
    std::optional<Section> header;             // when kind == header
};

/// Comment-aware classification of raw lines, mirroring the parser's view.
std::vector<LineInfo> classify(const std::vector<std::string>& raw) {
    std::vector<LineInfo> info(raw.size());
    int depth = 0;
    Section current = Section::prelude;
    for (size_t i = 0; i < raw.size(); ++i) {
        std::string s = strip_comments_line(raw[i], depth);
        LineInfo& li = info[i];
        if (blank_line(s)) {
            li.kind = LineInfo::Kind::blank;
        } else if (delimiter_line(s)) {
            li.kind = LineInfo::Kind::delimiter;
        } else {
            std::string word = trimmed(s);
            if (auto sec = section_from_name(word)) {
                li.kind = LineInfo::Kind::header;
                li.header = *sec;
                current = *sec;
            }
        }
        li.section = current;
    }
    return info;
}

int syntax_errors_of(const std::string& text) {
    ParseResult r = parse_game(SourceText{text, "repair-candidate"});
    return count_syntax_errors(r.diagnostics);
}

std::vector<Diagnostic> diagnostics_of(const std::string& text) {
    return parse_game(SourceText{text, "repair-candidate"}).diagnostics;
}

struct Candidate {
    std::string text;
    std::string description;
};

// 1. Extract the contents of the only fenced code block.
std::vector<Candidate> fence_candidates(const std::string& text) {
    auto raw = split_lines(text);
    std::vector<size_t> fences;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (trimmed(raw[i]).rfind("```", 0) == 0) fences.push_back(i);
    }
    if (fences.size() != 2) return {};
    std::vector<std::string> inner(raw.begin() + fences[0] + 1, raw.begin() + fences[1]);
    return {{join_lines(inner), "extracted the fenced code block, dropped surrounding prose"}};
}

// 2. Wrap bare section headers in ==== delimiters.
std::vector<Candidate> delimiter_candidates(const std::string& text) {
    auto raw = split_lines(text);
    auto info = classify(raw);
    auto nonblank = [&](size_t i, int dir) -> const LineInfo* {
        for (size_t j = i;;) {
            if (dir < 0 && j == 0) return nullptr;
            j = static_cast<size_t>(static_cast<long>(j) + dir);
            if (j >= raw.size()) return nullptr;
            if (info[j].kind != LineInfo::Kind::blank) return &info[j];
        }
    };
    std::vector<Candidate> out;
    std::vector<std::string> fixed;
    std::vector<std::string> names;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (info[i].kind == LineInfo::Kind::header) {
            const LineInfo* prev = nonblank(i, -1);
            const LineInfo* next = nonblank(i, +1);
            bool before = prev && prev->kind == LineInfo::Kind::delimiter;
            bool after = next && next->kind == LineInfo::Kind::delimiter;
            if (!before) fixed.push_back("========");
            fixed.push_back(raw[i]);
            if (!after) fixed.push_back("========");
            if (!before || !after) names.push_back(trimmed(raw[i]));
        } else {
            fixed.push_back(raw[i]);
        }
    }
    if (names.empty()) return {};
    std::string desc = "inserted ==== delimiters around section header";
    if (names.size() > 1) desc += 's';
    for (size_t i = 0; i < names.size(); ++i) desc += (i ? ", '" : " '") + names[i] + "'";
    out.push_back({join_lines(fixed), std::move(desc)});
    return out;
}

int canonical_index(Section s) { return static_cast<int>(s); }

// 3. Insert a section header where the canonical order admits exactly one.
std::vector<Candidate> header_candidates(const std::string& text) {
    auto raw = split_lines(text);
    auto info = classify(raw);
    std::set<Section> present;
    for (const auto& li : info)
        if (li.header) present.insert(*li.header);

    auto diags = diagnostics_of(text);
    std::vector<Candidate> out;
    std::set<size_t> tried_lines;
    for (const auto& d : diags) {
        if (d.severity != Severity::error || d.phase != Phase::syntax) continue;
        size_t line_idx = static_cast<size_t>(d.line - 1);
        if (line_idx >= raw.size() || !tried_lines.insert(line_idx).second) continue;
        Section enclosing = info[line_idx].section;
        // canonical window: (enclosing, next present header after this line)
        int lo = canonical_index(enclosing);
        int hi = canonical_index(Section::levels) + 1;
        for (size_t j = line_idx + 1; j < raw.size(); ++j) {
            if (info[j].header) {
                hi = canonical_index(*info[j].header);
                break;
            }
        }
        std::vector<Section> absent;
        for (int s = lo + 1; s < hi; ++s) {
            Section sec = static_cast<Section>(s);
            if (!present.count(sec)) absent.push_back(sec);
        }
        if (absent.size() != 1) continue;  // ambiguous or nothing missing
        std::vector<std::string> fixed(raw.begin(), raw.begin() + line_idx);
        fixed.push_back("========");
        fixed.push_back(section_name(absent[0]));
        fixed.push_back("========");
        fixed.insert(fixed.end(), raw.begin() + line_idx, raw.end());
        out.push_back({join_lines(fixed),
                       std::string("inserted missing section header '") + section_name(absent[0]) +
                           "' before line " + std::to_string(d.line)});
    }
    return out;
}

// 4. Drop trailing non-grammar prose after the last level content.
std::vector<Candidate> prose_candidates(const std::string& text) {
    auto raw = split_lines(text);
    auto info = classify(raw);
    auto diags = diagnostics_of(text);
    std::optional<size_t> first_err, last_err;
    for (const auto& d : diags) {
        if (d.severity != Severity::error || d.phase != Phase::syntax) continue;
        size_t idx = static_cast<size_t>(d.line - 1);
        if (idx >= raw.size()) continue;
        if (info[idx].section != Section::levels || info[idx].kind != LineInfo::Kind::content)
            continue;
        if (!first_err || idx < *first_err) first_err = idx;
        if (!last_err || idx > *last_err) last_err = idx;
    }
    if (!first_err) return {};
    // only a trailing run: nothing but blanks after the last offending line
    for (size_t j = *last_err + 1; j < raw.size(); ++j)
        if (info[j].kind != LineInfo::Kind::blank) return {};
    // keep at least one level line before the cut
    bool content_before = false;
    for (size_t j = 0; j < *first_err; ++j) {
        if (info[j].section == Section::levels && info[j].kind == LineInfo::Kind::content &&
            !info[j].header) {
            content_before = true;
            break;
        }
    }
    if (!content_before) return {};
    std::vector<std::string> fixed(raw.begin(), raw.begin() + *first_err);
    return {{join_lines(fixed), "stripped trailing prose after the LEVELS section (line " +
                                    std::to_string(*first_err + 1) + " onward)"}};
}

// 5. Pad ragged level rows with the level's most common background glyph.
std::vector<Candidate> ragged_candidates(const std::string& text) {
    auto raw = split_lines(text);
    auto info = classify(raw);
    auto diags = diagnostics_of(text);
    bool any_ragged = std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.code == codes::ragged_level;
    });
    if (!any_ragged) return {};

    // glyphs aliased to Background, straight from the LEGEND lines
    std::set<char> background_glyphs;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (info[i].section != Section::legend || info[i].kind != LineInfo::Kind::content ||
            info[i].header)
            continue;
        std::string line = trimmed(raw[i]);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string glyph = trimmed(line.substr(0, eq));
        std::string member = to_lower(trimmed(line.substr(eq + 1)));
        if (glyph.size() == 1 && member == "background") background_glyphs.insert(glyph[0]);
    }

    std::vector<std::string> fixed = raw;
    bool changed = false;
    size_t i = 0;
    while (i < raw.size()) {
        if (info[i].section != Section::levels || info[i].kind != LineInfo::Kind::content ||
            info[i].header || to_lower(trimmed(raw[i])).rfind("message", 0) == 0) {
            ++i;
            continue;
        }
        size_t begin = i;
        size_t width = 0;
        std::map<char, int> counts;
        while (i < raw.size() && info[i].section == Section::levels &&
               info[i].kind == LineInfo::Kind::content && !info[i].header &&
               to_lower(trimmed(raw[i])).rfind("message", 0) != 0) {
            std::string row = trimmed(raw[i]);
            width = std::max(width, row.size());
            for (char c : row) counts[c]++;
            ++i;
        }
        char pad = 0;
        int best = -1;
        for (char g : background_glyphs) {
            auto it = counts.find(g);
            if (it != counts.end() && it->second > best) {
                best = it->second;
                pad = g;
            }
        }
        if (pad == 0) {
            for (const auto& [c, n] : counts) {
                if (n > best) {
                    best = n;
                    pad = c;
                }
            }
        }
        if (pad == 0) continue;
        for (size_t j = begin; j < i; ++j) {
            std::string row = trimmed(fixed[j]);
            if (row.size() < width) {
                row.append(width - row.size(), pad);
                fixed[j] = row;
                changed = true;
            }
        }
    }
    if (!changed) return {};
    return {{join_lines(fixed), "padded ragged level rows with the background glyph"}};
}

}  // namespace

RepairResult repair_source(const SourceText& source, const std::vector<Diagnostic>&) {
    std::string current = normalize_newlines(source.content);
    std::vector<std::string> applied;
    int current_errors = syntax_errors_of(current);

    using Generator = std::vector<Candidate> (*)(const std::string&);
    const Generator catalog[] = {fence_candidates, delimiter_candidates, header_candidates,
                                 prose_candidates, ragged_candidates};

    bool improved = true;
    while (improved && current_errors > 0) {
        improved = false;
        for (Generator gen : catalog) {
            for (auto& cand : gen(current)) {
                int errs = syntax_errors_of(cand.text);
                if (errs < current_errors) {
                    current = std::move(cand.text);
                    current_errors = errs;
                    applied.push_back(std::move(cand.description));
                    improved = true;
                    break;
                }
            }
            if (improved) break;
        }
    }

    if (applied.empty()) return {source, {}};
    return {SourceText{std::move(current), source.origin}, std::move(applied)};
}

}  // namespace pskit
