#pragma once

#include <string>

#include "pskit/compiler.hpp"
#include "pskit/engine.hpp"

namespace pskit {

/// Renders the grid as one glyph per cell, with ANSI 24-bit background
/// colors when `color` is set. Used by the terminal play mode.
std::string render_state(const CompiledGame& game, const GameState& state, bool color);

}  // namespace pskit
