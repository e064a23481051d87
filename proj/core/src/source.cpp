#include "pskit/source.hpp"

namespace pskit {

std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            out.push_back('\n');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

SourceText make_source(std::string_view content, std::string origin) {
    return SourceText{normalize_newlines(content), std::move(origin)};
}

}  // namespace pskit
