#include "pskit/render.hpp"

#include <sstream>

namespace pskit {

std::string render_state(const CompiledGame& game, const GameState& state, bool color) {
    std::ostringstream os;
    for (int y = 0; y < state.height; ++y) {
        for (int x = 0; x < state.width; ++x) {
            // topmost occupied layer wins
            ObjectId top = kNoObject;
            for (int l = state.layers - 1; l >= 0; --l) {
                ObjectId id = state.at(x, y, l);
                if (id != kNoObject) {
                    top = id;
                    break;
                }
            }
            if (top == kNoObject) {
                os << ' ';
                continue;
            }
            const CompiledObject& obj = game.object(top);
            char glyph = obj.glyph.empty() ? obj.display_name[0] : obj.glyph[0];
            if (top == game.background_id && glyph == '.') glyph = ' ';
            if (color && !obj.colors.empty() && !obj.colors[0].transparent) {
                const Color& c = obj.colors[0];
                os << "\x1b[48;2;" << int(c.r) << ';' << int(c.g) << ';' << int(c.b) << 'm';
                // readable foreground: black on light, white on dark
                int luma = (int(c.r) * 299 + int(c.g) * 587 + int(c.b) * 114) / 1000;
                os << (luma > 128 ? "\x1b[30m" : "\x1b[97m") << glyph << "\x1b[0m";
            } else {
                os << glyph;
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace pskit
