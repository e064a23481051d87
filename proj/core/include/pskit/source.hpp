#pragma once

#include <string>
#include <string_view>

namespace pskit {

/// A unit of PuzzleScript source plus where it came from (file path,
/// corpus id, or "llm-iteration-k"). Content is UTF-8 with LF line
/// endings; use make_source() to normalize raw input.
struct SourceText {
    std::string content;
    std::string origin;

    bool operator==(const SourceText&) const = default;
};

std::string normalize_newlines(std::string_view text);

SourceText make_source(std::string_view content, std::string origin);

}  // namespace pskit
