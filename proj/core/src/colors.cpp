#include "pskit/colors.hpp"

#include <array>
#include <cctype>

namespace pskit {
namespace {

struct NamedColor {
    std::string_view name;
    uint8_t r, g, b;
};

// Default PuzzleScript palette (arne), transparent handled separately.
constexpr std::array<NamedColor, 24> kPalette{{
    {"black", 0x00, 0x00, 0x00},
    {"white", 0xff, 0xff, 0xff},
    {"grey", 0x9d, 0x9d, 0x9d},
    {"gray", 0x9d, 0x9d, 0x9d},
    {"darkgrey", 0x69, 0x71, 0x75},
    {"darkgray", 0x69, 0x71, 0x75},
    {"lightgrey", 0xcc, 0xcc, 0xcc},
    {"lightgray", 0xcc, 0xcc, 0xcc},
    {"red", 0xbe, 0x26, 0x33},
    {"darkred", 0x73, 0x29, 0x30},
    {"lightred", 0xe0, 0x6f, 0x8b},
    {"brown", 0xa4, 0x64, 0x22},
    {"darkbrown", 0x49, 0x3c, 0x2b},
    {"lightbrown", 0xeb, 0x89, 0x31},
    {"orange", 0xeb, 0x89, 0x31},
    {"yellow", 0xf7, 0xe2, 0x6b},
    {"green", 0x44, 0x89, 0x1a},
    {"darkgreen", 0x2f, 0x48, 0x4e},
    {"lightgreen", 0xa3, 0xce, 0x27},
    {"blue", 0x31, 0xa2, 0xf2},
    {"lightblue", 0xb2, 0xdc, 0xef},
    {"darkblue", 0x00, 0x57, 0x84},
    {"purple", 0x34, 0x24, 0x66},
    {"pink", 0xe0, 0x6f, 0x8b},
}};

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string lowered(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::optional<Color> parse_color(std::string_view token) {
    std::string low = lowered(token);
    if (low == "transparent") {
        Color c;
        c.spelling = low;
        c.transparent = true;
        return c;
    }
    for (const auto& nc : kPalette) {
        if (low == nc.name) return Color{low, nc.r, nc.g, nc.b, false};
    }
    if (!low.empty() && low[0] == '#' && (low.size() == 4 || low.size() == 7)) {
        int digits[6];
        size_t n = low.size() - 1;
        for (size_t i = 0; i < n; ++i) {
            digits[i] = hex_digit(low[i + 1]);
            if (digits[i] < 0) return std::nullopt;
        }
        Color c;
        c.spelling = low;
        if (n == 3) {
            c.r = static_cast<uint8_t>(digits[0] * 17);
            c.g = static_cast<uint8_t>(digits[1] * 17);
            c.b = static_cast<uint8_t>(digits[2] * 17);
        } else {
            c.r = static_cast<uint8_t>(digits[0] * 16 + digits[1]);
            c.g = static_cast<uint8_t>(digits[2] * 16 + digits[3]);
            c.b = static_cast<uint8_t>(digits[4] * 16 + digits[5]);
        }
        return c;
    }
    return std::nullopt;
}

}  // namespace pskit
