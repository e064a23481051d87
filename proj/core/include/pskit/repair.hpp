#pragma once

#include <string>
#include <vector>

#include "pskit/diagnostics.hpp"
#include "pskit/source.hpp"

namespace pskit {

struct RepairResult {
    SourceText repaired;
    std::vector<std::string> repairs;  // human-readable, one per applied fix
};

/// Applies the fixed repair catalog, in order, re-parsing after each
/// candidate and keeping it only when the syntax error count strictly
/// drops:
///   1. extract the fenced code block (when exactly one fence pair exists)
///   2. insert missing ==== delimiters around section headers
///   3. insert a missing section header when the canonical order pins it down
///   4. strip trailing non-grammar prose after the LEVELS content
///   5. pad ragged level rows with the level's most common background glyph
/// Unreparable input comes back unchanged with an empty repair list, and
/// repairing a repaired source is a no-op.
RepairResult repair_source(const SourceText& source, const std::vector<Diagnostic>& diagnostics);

}  // namespace pskit
