#include "play_mode.hpp"

#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "pskit/engine.hpp"
#include "pskit/render.hpp"

namespace pskit {
namespace {

struct RawTerminal {
    termios saved{};
    bool active = false;

    RawTerminal() {
        if (tcgetattr(STDIN_FILENO, &saved) != 0) return;
        termios raw = saved;
        raw.c_lflag &= ~static_cast<tcflag_t>(ICANON | ECHO);
        raw.c_cc[VMIN] = 1;
        raw.c_cc[VTIME] = 0;
        active = tcsetattr(STDIN_FILENO, TCSANOW, &raw) == 0;
    }
    ~RawTerminal() {
        if (active) tcsetattr(STDIN_FILENO, TCSANOW, &saved);
    }
};

enum class Key { up, down, left, right, act, undo, restart, quit, none };

Key read_key() {
    unsigned char c = 0;
    if (read(STDIN_FILENO, &c, 1) != 1) return Key::quit;
    switch (c) {
        case 'x': case 'X': return Key::act;
        case 'z': case 'Z': return Key::undo;
        case 'r': case 'R': return Key::restart;
        case 'q': case 'Q': return Key::quit;
        case 0x1b: {  // ESC [ A/B/C/D
            unsigned char seq[2];
            if (read(STDIN_FILENO, seq, 1) != 1) return Key::quit;
            if (seq[0] != '[') return Key::none;
            if (read(STDIN_FILENO, seq + 1, 1) != 1) return Key::quit;
            switch (seq[1]) {
                case 'A': return Key::up;
                case 'B': return Key::down;
                case 'C': return Key::right;
                case 'D': return Key::left;
            }
            return Key::none;
        }
        default: return Key::none;
    }
}

void draw(const CompiledGame& game, const GameState& state, bool color, int moves,
          const std::vector<std::string>& messages) {
    std::cout << "\x1b[2J\x1b[H";
    if (!game.flags.title.empty()) std::cout << game.flags.title << "\n";
    std::cout << "level " << state.level_index << "  moves " << moves
              << "   arrows move, X act, Z undo, R restart, Q quit\n\n";
    std::cout << render_state(game, state, color);
    for (const auto& m : messages) std::cout << "\n> " << m << "\n";
    std::cout.flush();
}

int run_replay(const CompiledGame& game, const PlayOptions& options, const std::string& letters) {
    auto actions = actions_from_letters(letters);
    if (!actions) {
        std::cerr << "replay file contains characters other than U/D/L/R/X\n";
        return 2;
    }
    GameState state = init_state(game, options.level);
    int moves = 0;
    for (Action a : *actions) {
        if (state.status != GameState::Status::in_progress) break;
        TurnOutcome outcome = step(game, state, a);
        if (outcome.error) {
            std::cerr << format_diagnostic(*outcome.error) << "\n";
            return 1;
        }
        state = std::move(outcome.state);
        ++moves;
    }
    std::cout << render_state(game, state, options.color);
    if (state.status == GameState::Status::won) {
        std::cout << "you win! (" << moves << " moves)\n";
        return 0;
    }
    std::cout << "replay ended without a win after " << moves << " moves\n";
    return 1;
}

}  // namespace

int play_game(const CompiledGame& game, const PlayOptions& options) {
    if (options.replay_file) {
        std::ifstream in(*options.replay_file);
        if (!in) {
            std::cerr << "cannot read replay file " << *options.replay_file << "\n";
            return 2;
        }
        std::string letters((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return run_replay(game, options, letters);
    }

    if (!isatty(STDIN_FILENO) || !isatty(STDOUT_FILENO)) {
        std::cerr << "play mode needs an interactive terminal (or --replay FILE)\n";
        return 2;
    }

    RawTerminal raw;
    if (!raw.active) {
        std::cerr << "could not switch the terminal to raw mode\n";
        return 2;
    }

    GameState state = init_state(game, options.level);
    std::vector<GameState> undo_stack;
    std::string recorded;
    int moves = 0;
    std::vector<std::string> messages;
    draw(game, state, options.color, moves, messages);

    while (true) {
        if (state.status == GameState::Status::won) {
            std::cout << "\nyou win! (" << moves << " moves)\n";
            break;
        }
        Key key = read_key();
        std::optional<Action> action;
        switch (key) {
            case Key::up: action = Action::up; break;
            case Key::down: action = Action::down; break;
            case Key::left: action = Action::left; break;
            case Key::right: action = Action::right; break;
            case Key::act: action = Action::act; break;
            case Key::undo:
                if (!undo_stack.empty()) {
                    state = std::move(undo_stack.back());
                    undo_stack.pop_back();
                    if (moves > 0) --moves;
                    if (!recorded.empty()) recorded.pop_back();
                }
                break;
            case Key::restart:
                undo_stack.push_back(state);
                state = init_state(game, options.level);
                break;
            case Key::quit: goto done;
            case Key::none: continue;
        }
        if (action) {
            TurnOutcome outcome = step(game, state, *action);
            if (outcome.error) {
                messages = {format_diagnostic(*outcome.error)};
            } else {
                messages.clear();
                for (const auto& e : outcome.events)
                    if (e.kind == EventKind::message) messages.push_back(e.text);
            }
            if (outcome.changed || outcome.state.status == GameState::Status::won) {
                undo_stack.push_back(state);
                recorded.push_back(action_letter(*action));
                ++moves;
                state = std::move(outcome.state);
            }
        }
        draw(game, state, options.color, moves, messages);
    }
done:
    if (options.record_file) {
        std::ofstream out(*options.record_file);
        out << recorded << "\n";
    }
    return 0;
}

}  // namespace pskit
