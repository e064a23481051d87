#include "pskit/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace pskit {

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    os << d.line << ':' << d.column << " [" << d.code << "] ";
    if (d.severity == Severity::warning) os << "warning: ";
    os << d.message;
    return os.str();
}

std::string format_diagnostics(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) {
        out += format_diagnostic(d);
        out += '\n';
    }
    return out;
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
    std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.line != b.line) return a.line < b.line;
        if (a.column != b.column) return a.column < b.column;
        return a.code < b.code;
    });
}

bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

int count_syntax_errors(const std::vector<Diagnostic>& ds) {
    int n = 0;
    for (const auto& d : ds)
        if (d.severity == Severity::error && d.phase == Phase::syntax) ++n;
    return n;
}

Diagnostic make_error(Phase phase, int line, int column, std::string_view code, std::string message) {
    return Diagnostic{Severity::error, phase, line, column, std::string(code), std::move(message)};
}

Diagnostic make_warning(Phase phase, int line, int column, std::string_view code, std::string message) {
    return Diagnostic{Severity::warning, phase, line, column, std::string(code), std::move(message)};
}

}  // namespace pskit
