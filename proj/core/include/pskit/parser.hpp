#pragma once

#include <optional>
#include <vector>

#include "pskit/ast.hpp"
#include "pskit/diagnostics.hpp"
#include "pskit/source.hpp"

namespace pskit {

struct ParseResult {
    std::optional<GameSpec> spec;  // present iff no syntax errors
    std::vector<Diagnostic> diagnostics;
};

/// Total parse: never throws on malformed input, accumulates positioned
/// diagnostics instead. Diagnostics come back sorted by (line, column).
ParseResult parse_game(const SourceText& source);

/// Canonical section order. Exposed for the printer and the repair pass.
enum class Section { prelude, objects, legend, sounds, collisionlayers, rules, winconditions, levels };
const char* section_name(Section s);
std::optional<Section> section_from_name(std::string_view word);

}  // namespace pskit
