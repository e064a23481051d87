#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pskit {

/// A color value from an OBJECTS palette line: a known color word or a
/// #rgb / #rrggbb hex literal. `spelling` keeps the lowercased source form
/// so the canonical printer can reproduce it.
struct Color {
    std::string spelling;
    uint8_t r = 0, g = 0, b = 0;
    bool transparent = false;

    bool operator==(const Color& o) const { return spelling == o.spelling; }
};

/// Parses a color word or hex literal (case-insensitive). Empty optional
/// when the token is not a recognized color.
std::optional<Color> parse_color(std::string_view token);

}  // namespace pskit
