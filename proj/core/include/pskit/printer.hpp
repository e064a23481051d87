#pragma once

#include <string>

#include "pskit/ast.hpp"
#include "pskit/source.hpp"

namespace pskit {

/// Prints a spec in canonical form: sections in canonical order, keywords
/// lowercased, identifiers in their original casing. Reparsing the output
/// yields a structurally equal spec.
SourceText print_game(const GameSpec& spec, std::string origin = "printed");

}  // namespace pskit
