#pragma once

#include <string_view>

namespace pskit {

/// The versioned PuzzleScript syntax digest that seeds every generation
/// prompt's system text.
std::string_view docs_digest();
std::string_view docs_digest_version();

}  // namespace pskit
