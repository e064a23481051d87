#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pskit {

enum class Severity { error, warning };
enum class Phase { syntax, semantic, runtime };

/// One positioned message. The text rendering `line:col [CODE] message`
/// is a stable format: it is fed back into LLM prompts verbatim, so codes
/// must not change between releases.
struct Diagnostic {
    Severity severity = Severity::error;
    Phase phase = Phase::syntax;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    std::string code;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

// Stable diagnostic codes.
namespace codes {
// syntax
inline constexpr std::string_view missing_section_delimiter = "MISSING_SECTION_DELIMITER";
inline constexpr std::string_view stray_delimiter = "STRAY_DELIMITER";
inline constexpr std::string_view duplicate_section = "DUPLICATE_SECTION";
inline constexpr std::string_view unknown_prelude_key = "UNKNOWN_PRELUDE_KEY";
inline constexpr std::string_view invalid_object = "INVALID_OBJECT";
inline constexpr std::string_view invalid_color = "INVALID_COLOR";
inline constexpr std::string_view invalid_sprite = "INVALID_SPRITE";
inline constexpr std::string_view invalid_legend = "INVALID_LEGEND";
inline constexpr std::string_view invalid_layer = "INVALID_LAYER";
inline constexpr std::string_view invalid_rule = "INVALID_RULE";
inline constexpr std::string_view invalid_ellipsis = "INVALID_ELLIPSIS";
inline constexpr std::string_view rule_arity_mismatch = "RULE_ARITY_MISMATCH";
inline constexpr std::string_view invalid_win_condition = "INVALID_WIN_CONDITION";
inline constexpr std::string_view invalid_level_line = "INVALID_LEVEL_LINE";
inline constexpr std::string_view ragged_level = "RAGGED_LEVEL";
// semantic
inline constexpr std::string_view undefined_object = "UNDEFINED_OBJECT";
inline constexpr std::string_view duplicate_definition = "DUPLICATE_DEFINITION";
inline constexpr std::string_view object_in_no_layer = "OBJECT_IN_NO_LAYER";
inline constexpr std::string_view object_in_many_layers = "OBJECT_IN_MANY_LAYERS";
inline constexpr std::string_view no_player_defined = "NO_PLAYER_DEFINED";
inline constexpr std::string_view unknown_glyph_in_level = "UNKNOWN_GLYPH_IN_LEVEL";
inline constexpr std::string_view unsupported_feature = "UNSUPPORTED_FEATURE";
inline constexpr std::string_view level_cell_collision = "LEVEL_CELL_COLLISION";
inline constexpr std::string_view rule_cell_collision = "RULE_CELL_COLLISION";
inline constexpr std::string_view unbound_property = "UNBOUND_PROPERTY";
inline constexpr std::string_view empty_levels = "EMPTY_LEVELS";
inline constexpr std::string_view unused_object = "UNUSED_OBJECT";
inline constexpr std::string_view no_win_condition = "NO_WIN_CONDITION";
inline constexpr std::string_view background_layer_assumed = "BACKGROUND_LAYER_ASSUMED";
// runtime
inline constexpr std::string_view rule_loop_detected = "RULE_LOOP_DETECTED";
inline constexpr std::string_view nondeterministic_game = "NONDETERMINISTIC_GAME";
}  // namespace codes

std::string format_diagnostic(const Diagnostic& d);
std::string format_diagnostics(const std::vector<Diagnostic>& ds);

/// Stable (line, column, code) order.
void sort_diagnostics(std::vector<Diagnostic>& ds);

bool has_errors(const std::vector<Diagnostic>& ds);
int count_syntax_errors(const std::vector<Diagnostic>& ds);

Diagnostic make_error(Phase phase, int line, int column, std::string_view code, std::string message);
Diagnostic make_warning(Phase phase, int line, int column, std::string_view code, std::string message);

}  // namespace pskit
