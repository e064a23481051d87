#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "play_mode.hpp"
#include "pskit/compiler.hpp"
#include "pskit/corpus.hpp"
#include "pskit/metrics.hpp"
#include "pskit/orchestrator.hpp"
#include "pskit/parser.hpp"
#include "pskit/repair.hpp"
#include "pskit/solver.hpp"

namespace fs = std::filesystem;
using namespace pskit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // does not compile / unsolved / no trial succeeded
constexpr int kExitUsage = 2;   // usage or I/O failure

std::optional<SourceText> read_game_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return make_source(buf.str(), path);
}

nlohmann::json diagnostics_json(const std::vector<Diagnostic>& ds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : ds) {
        arr.push_back({{"line", d.line},
                       {"column", d.column},
                       {"code", d.code},
                       {"severity", d.severity == Severity::error ? "error" : "warning"},
                       {"phase", d.phase == Phase::syntax     ? "syntax"
                                 : d.phase == Phase::semantic ? "semantic"
                                                              : "runtime"},
                       {"message", d.message}});
    }
    return arr;
}

int cmd_parse(const std::string& file, bool do_repair, bool as_json) {
    auto source = read_game_file(file);
    if (!source) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    ParseResult result = parse_game(*source);
    std::vector<std::string> repairs;
    if (do_repair) {
        RepairResult repaired = repair_source(*source, result.diagnostics);
        repairs = repaired.repairs;
        result = parse_game(repaired.repaired);
        std::cout << repaired.repaired.content;
    }
    std::ostream& diag_out = do_repair ? std::cerr : std::cout;
    if (as_json) {
        nlohmann::json out{{"diagnostics", diagnostics_json(result.diagnostics)},
                           {"repairs", repairs},
                           {"ok", count_syntax_errors(result.diagnostics) == 0}};
        diag_out << out.dump(2) << "\n";
    } else {
        diag_out << format_diagnostics(result.diagnostics);
    }
    return count_syntax_errors(result.diagnostics) == 0 ? kExitOk : kExitDomain;
}

int cmd_compile(const std::string& file) {
    auto source = read_game_file(file);
    if (!source) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    ParseResult parsed = parse_game(*source);
    std::cout << format_diagnostics(parsed.diagnostics);
    if (!parsed.spec) return kExitDomain;
    CompileResult compiled = compile(*parsed.spec);
    std::cout << format_diagnostics(compiled.diagnostics);
    return compiled.game ? kExitOk : kExitDomain;
}

int cmd_solve(const std::string& file, const std::string& level_arg, uint64_t budget, bool as_json,
              std::optional<double> time_budget) {
    auto source = read_game_file(file);
    if (!source) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    ParseResult parsed = parse_game(*source);
    if (!parsed.spec) {
        std::cerr << format_diagnostics(parsed.diagnostics);
        return kExitUsage;
    }
    CompileResult compiled = compile(*parsed.spec);
    if (!compiled.game) {
        std::cerr << format_diagnostics(compiled.diagnostics);
        return kExitUsage;
    }
    const CompiledGame& game = *compiled.game;

    SolverConfig config;
    config.node_budget = budget;
    config.per_level_time_budget = time_budget;

    std::vector<int> levels;
    if (level_arg == "all") {
        for (size_t i = 0; i < game.levels.size(); ++i) levels.push_back(static_cast<int>(i));
    } else {
        int n = -1;
        try {
            n = std::stoi(level_arg);
        } catch (...) {
        }
        if (n < 0 || n >= static_cast<int>(game.levels.size())) {
            std::cerr << "level index out of range (game has " << game.levels.size()
                      << " level entries)\n";
            return kExitUsage;
        }
        if (game.levels[n].is_message) {
            std::cerr << "level " << n << " is a message entry, not a grid level\n";
            return kExitUsage;
        }
        levels.push_back(n);
    }

    bool all_solved = true;
    nlohmann::json records = nlohmann::json::array();
    for (int idx : levels) {
        SolveResult r;
        if (game.levels[idx].is_message) {
            r.status = SolveStatus::skipped_message;
        } else {
            r = bfs_solve(game, idx, config);
        }
        if (as_json) {
            records.push_back({{"level", idx},
                               {"status", solve_status_name(r.status)},
                               {"length", r.solution_length},
                               {"nodes", r.nodes_explored},
                               {"enqueued", r.enqueued},
                               {"solution", action_letters(r.solution)}});
        } else {
            std::cout << solve_result_line(idx, r) << "\n";
            if (r.status == SolveStatus::solved)
                std::cout << "solution " << action_letters(r.solution) << "\n";
        }
        if (r.status != SolveStatus::solved && r.status != SolveStatus::skipped_message)
            all_solved = false;
    }
    if (as_json) std::cout << records.dump(2) << "\n";
    return all_solved ? kExitOk : kExitDomain;
}

int cmd_play(const std::string& file, int level, std::optional<std::string> replay,
             std::optional<std::string> record, bool no_color) {
    auto source = read_game_file(file);
    if (!source) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    ParseResult parsed = parse_game(*source);
    if (!parsed.spec) {
        std::cerr << format_diagnostics(parsed.diagnostics);
        return kExitUsage;
    }
    CompileResult compiled = compile(*parsed.spec);
    if (!compiled.game) {
        std::cerr << format_diagnostics(compiled.diagnostics);
        return kExitUsage;
    }
    if (level < 0 || level >= static_cast<int>(compiled.game->levels.size()) ||
        compiled.game->levels[level].is_message) {
        std::cerr << "level " << level << " is not a grid level\n";
        return kExitUsage;
    }
    PlayOptions options;
    options.level = level;
    options.replay_file = std::move(replay);
    options.record_file = std::move(record);
    options.color = !no_color;
    return play_game(*compiled.game, options);
}

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return buf;
}

struct GenerateOptions {
    std::string corpus_dir;
    bool fewshot = false;
    bool cot = false;
    bool brainstorm = false;
    int context_budget = 30'000;
    int trials = 1;
    std::string backend_spec = "http";
    std::string out_dir = "trials";
    int jobs = 1;
    std::string model = "default";
    int max_iterations = 10;
    uint64_t node_budget = 1'000'000;
    uint64_t seed = 0;
    std::string endpoint = "http://localhost:8080";
    std::string api_key;
    int max_output_tokens = 8192;
    double temperature = 1.0;
};

int cmd_generate(const GenerateOptions& opt) {
    if (opt.trials < 1) {
        std::cerr << "--trials must be at least 1\n";
        return kExitUsage;
    }
    Corpus corpus;
    if (opt.fewshot) {
        if (opt.corpus_dir.empty()) {
            std::cerr << "--fewshot needs --corpus DIR\n";
            return kExitUsage;
        }
        try {
            corpus = load_corpus(opt.corpus_dir);
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return kExitUsage;
        }
    }

    HttpBackendConfig http;
    http.endpoint = opt.endpoint;
    http.api_key = opt.api_key;
    {
        // fail fast on a bad backend spec before spawning workers
        std::string error;
        auto probe = make_backend_from_spec(opt.backend_spec, http, error);
        if (!probe) {
            std::cerr << error << "\n";
            return kExitUsage;
        }
    }

    fs::path out_root(opt.out_dir);
    std::error_code ec;
    fs::create_directories(out_root, ec);
    std::string stamp = timestamp_now();

    std::atomic<int> next_trial{0};
    std::atomic<int> successes{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        for (;;) {
            int trial = next_trial.fetch_add(1);
            if (trial >= opt.trials) return;

            TrialConfig config;
            config.max_iterations = opt.max_iterations;
            config.fewshot = opt.fewshot;
            config.chain_of_thought = opt.cot;
            config.brainstorm = opt.brainstorm;
            config.context_budget = opt.context_budget;
            config.solver.node_budget = opt.node_budget;
            config.rng_seed = opt.seed + static_cast<uint64_t>(trial);
            config.model = opt.model;
            config.max_output_tokens = opt.max_output_tokens;
            config.temperature = opt.temperature;

            std::string error;
            auto backend = make_backend_from_spec(opt.backend_spec, http, error);
            if (!backend) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "trial " << trial << ": " << error << "\n";
                continue;
            }

            TrialRecord record = run_trial(*backend, opt.fewshot ? &corpus : nullptr, config);
            fs::path dir = out_root / (stamp + "-" + std::to_string(config.rng_seed));
            persist_trial(record, dir);
            if (record.outcome == TrialOutcome::success) successes.fetch_add(1);

            std::lock_guard<std::mutex> lock(io_mutex);
            std::cout << "trial " << trial << ": " << trial_outcome_name(record.outcome);
            if (record.success_iteration)
                std::cout << " (iteration " << *record.success_iteration << ")";
            std::cout << " -> " << dir.string() << "\n";
        }
    };

    int jobs = std::max(1, opt.jobs);
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    return successes.load() > 0 ? kExitOk : kExitDomain;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& group_by, bool csv) {
    std::vector<TrialSummary> summaries;
    for (const auto& dir : dirs) {
        std::error_code ec;
        if (!fs::exists(dir, ec)) continue;
        if (fs::is_regular_file(dir, ec)) {
            if (auto s = load_trial_summary(dir)) summaries.push_back(*s);
            continue;
        }
        for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
            if (entry.is_regular_file() && entry.path().filename() == "summary.json") {
                if (auto s = load_trial_summary(entry.path())) summaries.push_back(*s);
            }
        }
    }
    if (summaries.empty()) {
        std::cerr << "no trial records found\n";
        return kExitUsage;
    }
    SummaryTable table = aggregate(summaries, group_by);
    std::cout << (csv ? render_table_csv(table) : render_table_text(table));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PuzzleScript toolchain: parse, compile, solve, play, generate, report"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from a key = value file");

    uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for all randomized subsystems")->capture_default_str();

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "tokenize and parse a game file");
    std::string parse_file;
    bool parse_repair = false, parse_json = false;
    parse_cmd->add_option("file", parse_file, "PuzzleScript source file")->required();
    parse_cmd->add_flag("--repair", parse_repair, "apply the repair catalog, print repaired source");
    parse_cmd->add_flag("--json", parse_json, "structured diagnostics");

    // compile
    auto* compile_cmd = app.add_subcommand("compile", "parse and semantically check a game file");
    std::string compile_file;
    compile_cmd->add_option("file", compile_file, "PuzzleScript source file")->required();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "breadth-first-search playtest");
    std::string solve_file, solve_level = "all";
    uint64_t solve_budget = 1'000'000;
    double solve_time_budget = 0;
    bool solve_json = false;
    solve_cmd->add_option("file", solve_file, "PuzzleScript source file")->required();
    solve_cmd->add_option("--level", solve_level, "level index or 'all'")->capture_default_str();
    solve_cmd->add_option("--budget", solve_budget, "unique-state budget")->capture_default_str();
    solve_cmd->add_option("--time-budget", solve_time_budget, "wall-clock seconds per level (0 = off)");
    solve_cmd->add_flag("--json", solve_json, "machine-readable records");

    // play
    auto* play_cmd = app.add_subcommand("play", "play a level in the terminal");
    std::string play_file, play_replay, play_record;
    int play_level = 0;
    bool play_no_color = false;
    play_cmd->add_option("file", play_file, "PuzzleScript source file")->required();
    play_cmd->add_option("--level", play_level, "level index")->capture_default_str();
    play_cmd->add_option("--replay", play_replay, "file of action letters (UDLRX) to play back");
    play_cmd->add_option("--record", play_record, "write pressed actions to this file");
    play_cmd->add_flag("--no-color", play_no_color, "plain glyph output");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "run LLM game-generation trials");
    GenerateOptions gen;
    gen_cmd->add_option("--corpus", gen.corpus_dir, "directory of human-authored games");
    gen_cmd->add_flag("--fewshot", gen.fewshot, "include sampled corpus games in the prompt");
    gen_cmd->add_flag("--cot", gen.cot, "chain-of-thought instruction");
    gen_cmd->add_flag("--brainstorm", gen.brainstorm, "ask the backend for a design idea first");
    gen_cmd->add_option("--context-budget", gen.context_budget, "token budget for few-shot games")
        ->capture_default_str();
    gen_cmd->add_option("--trials", gen.trials, "number of independent trials")->capture_default_str();
    gen_cmd->add_option("--backend", gen.backend_spec, "http | replay:FILE | mock:FILE")
        ->capture_default_str();
    gen_cmd->add_option("--out", gen.out_dir, "trial output directory")->capture_default_str();
    gen_cmd->add_option("--jobs", gen.jobs, "parallel trials")->capture_default_str();
    gen_cmd->add_option("--model", gen.model, "model identifier passed to the backend")
        ->capture_default_str();
    gen_cmd->add_option("--max-iterations", gen.max_iterations, "chances per trial")
        ->capture_default_str();
    gen_cmd->add_option("--node-budget", gen.node_budget, "solver unique-state budget")
        ->capture_default_str();
    gen_cmd->add_option("--endpoint", gen.endpoint, "OpenAI-compatible endpoint (scheme://host:port)")
        ->capture_default_str();
    gen_cmd->add_option("--api-key", gen.api_key,
                        "backend API key (PSKIT_API_KEY environment variable overrides)");
    gen_cmd->add_option("--max-output-tokens", gen.max_output_tokens, "completion token cap")
        ->capture_default_str();
    gen_cmd->add_option("--temperature", gen.temperature, "sampling temperature")
        ->capture_default_str();

    // report
    auto* report_cmd = app.add_subcommand("report", "aggregate trial records into a table");
    std::vector<std::string> report_dirs;
    std::string report_group = "all";
    bool report_csv = false;
    report_cmd->add_option("--trials", report_dirs, "trial directories or summary.json files")
        ->required()
        ->expected(-1);
    report_cmd->add_option("--group-by", report_group,
                           "comma list of fewshot,cot,brainstorm,context,model (or 'all')")
        ->capture_default_str();
    report_cmd->add_flag("--csv", report_csv, "CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (parse_cmd->parsed()) return cmd_parse(parse_file, parse_repair, parse_json);
        if (compile_cmd->parsed()) return cmd_compile(compile_file);
        if (solve_cmd->parsed())
            return cmd_solve(solve_file, solve_level, solve_budget, solve_json,
                             solve_time_budget > 0 ? std::optional<double>(solve_time_budget)
                                                   : std::nullopt);
        if (play_cmd->parsed())
            return cmd_play(play_file, play_level,
                            play_replay.empty() ? std::nullopt : std::optional(play_replay),
                            play_record.empty() ? std::nullopt : std::optional(play_record),
                            play_no_color);
        if (gen_cmd->parsed()) {
            gen.seed = seed;
            return cmd_generate(gen);
        }
        if (report_cmd->parsed()) return cmd_report(report_dirs, report_group, report_csv);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
