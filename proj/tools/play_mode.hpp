#pragma once

#include <optional>
#include <string>

#include "pskit/compiler.hpp"

namespace pskit {

struct PlayOptions {
    int level = 0;
    std::optional<std::string> replay_file;  // action letters, non-interactive
    std::optional<std::string> record_file;  // write pressed actions here
    bool color = true;
};

/// Terminal play loop: arrows move, X acts, Z undoes, R restarts, Q quits.
/// Returns the process exit code (0 won/quit, 1 replay fell short, 2 no
/// usable terminal).
int play_game(const CompiledGame& game, const PlayOptions& options);

}  // namespace pskit
