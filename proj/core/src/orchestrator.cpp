#include "pskit/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "pskit/compiler.hpp"
#include "pskit/docs_digest.hpp"
#include "pskit/parser.hpp"
#include "pskit/repair.hpp"

namespace pskit {

using nlohmann::json;

const char* trial_outcome_name(TrialOutcome o) {
    switch (o) {
        case TrialOutcome::success: return "success";
        case TrialOutcome::failed_max_iterations: return "failed_max_iterations";
        case TrialOutcome::backend_error: return "backend_error";
    }
    return "?";
}

namespace {

const char* kTaskHeader =
    "Design a complete, original PuzzleScript game: objects, legend, collision layers, "
    "rules, win conditions, and at least one level.\n"
    "Every level must be solvable, and solutions should take more than 10 moves.\n";

std::string fenced_block_instruction(bool chain_of_thought) {
    if (chain_of_thought) {
        return "Think step by step about the design before writing any code. When you are done "
               "reasoning, output the complete game source in one fenced code block (```).\n";
    }
    return "Respond with the complete game source in one fenced code block (```).\n";
}

std::string trimmed_copy(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool plausible_game_start(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        line = trimmed_copy(line);
        if (line.empty()) continue;
        if (line.find_first_not_of('=') == std::string::npos) return true;  // ==== delimiter
        std::string word = to_lower(line.substr(0, line.find_first_of(" \t")));
        if (section_from_name(word)) return true;
        static const char* keys[] = {"title", "author", "homepage", "background_color",
                                     "text_color", "run_rules_on_level_start", "again_interval",
                                     "norepeat_action"};
        for (const char* k : keys)
            if (word == k) return true;
        return false;
    }
    return false;
}

}  // namespace

std::optional<SourceText> extract_code(const std::string& raw_response, const std::string& origin) {
    std::vector<std::string> lines;
    std::istringstream is(raw_response);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);

    std::vector<size_t> fences;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trimmed_copy(lines[i]).rfind("```", 0) == 0) fences.push_back(i);
    }
    if (fences.size() >= 2) {
        // last complete pair
        size_t open = fences[fences.size() - 2], close = fences[fences.size() - 1];
        std::string body;
        for (size_t i = open + 1; i < close; ++i) {
            body += lines[i];
            body += '\n';
        }
        return make_source(body, origin);
    }
    std::string whole = trimmed_copy(raw_response);
    if (!whole.empty() && plausible_game_start(whole)) return make_source(whole + "\n", origin);
    return std::nullopt;
}

std::string brainstorm_instruction() {
    return "Brainstorm one concept for a small turn-based grid puzzle game that works in "
           "PuzzleScript: its objects, its core mechanic, and what makes a level of it "
           "interesting. Answer in at most four sentences of plain prose, no code.\n";
}

std::string render_feedback(const IterationRecord& iteration) {
    std::string out;
    if (!iteration.extracted_source) {
        out = "Your previous response did not contain a PuzzleScript program in a fenced code "
              "block. ";
        return out;
    }
    out += "=== PREVIOUS CODE ===\n";
    out += iteration.extracted_source->content;
    if (out.back() != '\n') out += '\n';
    if (!iteration.repairs.empty()) {
        out += "\n=== AUTOMATIC REPAIRS APPLIED ===\n";
        for (const auto& r : iteration.repairs) {
            out += r;
            out += '\n';
        }
    }
    if (!iteration.syntax_diagnostics.empty()) {
        out += "\n=== SYNTAX DIAGNOSTICS ===\n";
        out += format_diagnostics(iteration.syntax_diagnostics);
    }
    if (!iteration.compile_diagnostics.empty()) {
        out += "\n=== COMPILER DIAGNOSTICS ===\n";
        out += format_diagnostics(iteration.compile_diagnostics);
    }
    if (iteration.eval) {
        out += "\n=== PLAYTEST REPORT ===\n";
        out += "every level must admit a solution of more than 10 moves\n";
        // broken levels first
        std::vector<std::pair<int, const SolveResult*>> order;
        for (size_t i = 0; i < iteration.eval->per_level.size(); ++i)
            order.emplace_back(static_cast<int>(i), &iteration.eval->per_level[i]);
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            auto broken = [](const SolveResult* r) {
                if (r->status == SolveStatus::skipped_message) return false;
                return r->status != SolveStatus::solved;
            };
            return broken(a.second) > broken(b.second);
        });
        for (const auto& [idx, r] : order) {
            out += solve_result_line(idx, *r);
            out += '\n';
        }
    }
    return out;
}

Prompt build_prompt(const TrialConfig& config, const FewshotSample& sample, const Corpus* corpus,
                    const std::optional<std::string>& idea, const IterationRecord* prior) {
    Prompt p;
    p.system_text = "You are an expert PuzzleScript game designer. Use only the language subset "
                    "described below.\n\n";
    p.system_text += docs_digest();
    if (!sample.games.empty() && corpus) {
        p.system_text += "\nHere are complete example games written by humans:\n";
        for (const auto& id : sample.games) {
            const CorpusEntry* entry = corpus->find(id);
            if (!entry) continue;
            p.system_text += "\n=== EXAMPLE GAME: " + id + " ===\n";
            p.system_text += entry->source.content;
            if (p.system_text.back() != '\n') p.system_text += '\n';
        }
    }

    p.user_text = kTaskHeader;
    if (idea && !idea->empty()) {
        p.user_text += "\nBuild on this design idea: " + *idea + "\n";
    }
    if (prior) {
        p.user_text += "\nYour previous attempt needs fixes.\n\n";
        p.user_text += prior->feedback_rendered.empty() ? render_feedback(*prior)
                                                        : prior->feedback_rendered;
        p.user_text += "\nRewrite the game so it compiles and plays correctly.\n";
    }
    p.user_text += "\n";
    p.user_text += fenced_block_instruction(config.chain_of_thought);
    return p;
}

namespace {

struct BackendCall {
    std::optional<LlmResponse> response;
    std::string error;
};

/// Up to three attempts with exponential backoff on transport failures;
/// hard failures abort immediately.
BackendCall call_with_retry(LlmBackend& backend, const LlmRequest& request,
                            const std::vector<double>& backoff) {
    BackendCall out;
    const int attempts = 3;
    for (int i = 0; i < attempts; ++i) {
        CompletionResult r = backend.complete(request);
        if (r.ok()) {
            out.response = std::move(r.response);
            return out;
        }
        out.error = r.error;
        if (!r.transport_error) return out;
        if (i + 1 < attempts) {
            double delay = i < static_cast<int>(backoff.size()) ? backoff[i] : 0.0;
            if (delay > 0)
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }
    return out;
}

}  // namespace

TrialRecord run_trial(LlmBackend& backend, const Corpus* corpus, const TrialConfig& config) {
    TrialRecord rec;
    rec.config = config;

    if (config.fewshot && corpus) {
        rec.fewshot_sample = sample_fewshot(*corpus, config.context_budget, config.rng_seed);
    } else {
        rec.fewshot_sample.budget = config.context_budget;
    }

    LlmRequest base;
    base.model = config.model;
    base.max_output_tokens = config.max_output_tokens;
    base.temperature = config.temperature;

    if (config.brainstorm) {
        LlmRequest req = base;
        req.system_text = "You are a creative puzzle game designer.";
        req.user_text = brainstorm_instruction();
        BackendCall call = call_with_retry(backend, req, config.retry_backoff);
        if (!call.response) {
            rec.outcome = TrialOutcome::backend_error;
            rec.backend_error_message = call.error;
            return rec;
        }
        rec.session_responses.push_back(call.response->text);
        rec.idea = trimmed_copy(call.response->text);
    }

    for (int k = 1; k <= config.max_iterations; ++k) {
        const IterationRecord* prior = rec.iterations.empty() ? nullptr : &rec.iterations.back();
        IterationRecord it;
        it.prompt = build_prompt(config, rec.fewshot_sample, corpus, rec.idea, prior);

        LlmRequest req = base;
        req.system_text = it.prompt.system_text;
        req.user_text = it.prompt.user_text;
        BackendCall call = call_with_retry(backend, req, config.retry_backoff);
        if (!call.response) {
            rec.outcome = TrialOutcome::backend_error;
            rec.backend_error_message = call.error;
            rec.iterations.push_back(std::move(it));
            return rec;
        }
        it.raw_response = call.response->text;
        rec.session_responses.push_back(it.raw_response);

        bool success = false;
        it.extracted_source = extract_code(it.raw_response, "llm-iteration-" + std::to_string(k));
        if (it.extracted_source) {
            ParseResult first = parse_game(*it.extracted_source);
            RepairResult repaired = repair_source(*it.extracted_source, first.diagnostics);
            it.repairs = repaired.repairs;
            it.extracted_source = repaired.repaired;

            ParseResult parsed = parse_game(*it.extracted_source);
            it.syntax_diagnostics = parsed.diagnostics;
            if (parsed.spec) {
                CompileResult compiled = compile(*parsed.spec);
                it.compile_diagnostics = compiled.diagnostics;
                if (compiled.game) {
                    it.eval = eval_from_levels(solve_all_levels(*compiled.game, config.solver),
                                               config.eval);
                    success = it.eval->compiles && it.eval->all_solvable;
                }
            }
        }

        if (success) {
            rec.outcome = TrialOutcome::success;
            rec.success_iteration = k;
            rec.iterations.push_back(std::move(it));
            return rec;
        }
        if (k < config.max_iterations) it.feedback_rendered = render_feedback(it);
        rec.iterations.push_back(std::move(it));
    }
    rec.outcome = TrialOutcome::failed_max_iterations;
    return rec;
}

// ---- persistence ----

namespace {

json to_json(const SolveResult& r) {
    return json{{"status", solve_status_name(r.status)},
                {"length", r.solution_length},
                {"nodes", r.nodes_explored},
                {"enqueued", r.enqueued},
                {"solution", action_letters(r.solution)}};
}

SolveResult solve_result_from_json(const json& j) {
    SolveResult r;
    std::string status = j.value("status", "exhausted");
    for (SolveStatus s : {SolveStatus::solved, SolveStatus::exhausted, SolveStatus::budget_exceeded,
                          SolveStatus::nondeterministic, SolveStatus::engine_error,
                          SolveStatus::skipped_message}) {
        if (status == solve_status_name(s)) r.status = s;
    }
    r.solution_length = j.value("length", 0);
    r.nodes_explored = j.value("nodes", 0ULL);
    r.enqueued = j.value("enqueued", 0ULL);
    if (auto letters = actions_from_letters(j.value("solution", ""))) r.solution = *letters;
    return r;
}

json to_json(const GameEvalReport& e) {
    json levels = json::array();
    for (const auto& r : e.per_level) levels.push_back(to_json(r));
    return json{{"compiles", e.compiles},
                {"any_solvable", e.any_solvable},
                {"all_solvable", e.all_solvable},
                {"complexity", e.complexity},
                {"per_level", levels}};
}

GameEvalReport eval_from_json(const json& j) {
    GameEvalReport e;
    e.compiles = j.value("compiles", false);
    e.any_solvable = j.value("any_solvable", false);
    e.all_solvable = j.value("all_solvable", false);
    e.complexity = j.value("complexity", 0ULL);
    if (j.contains("per_level"))
        for (const auto& lj : j["per_level"]) e.per_level.push_back(solve_result_from_json(lj));
    return e;
}

json to_json(const TrialConfig& c) {
    json j{{"max_iterations", c.max_iterations},
           {"fewshot", c.fewshot},
           {"chain_of_thought", c.chain_of_thought},
           {"brainstorm", c.brainstorm},
           {"context_budget", c.context_budget},
           {"rng_seed", c.rng_seed},
           {"model", c.model},
           {"max_output_tokens", c.max_output_tokens},
           {"temperature", c.temperature},
           {"node_budget", c.solver.node_budget},
           {"any_solvable_min_length", c.eval.any_solvable_min_length},
           {"all_solvable_min_length", c.eval.all_solvable_min_length}};
    return j;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace

TrialSummary summarize(const TrialRecord& record) {
    TrialSummary s;
    s.fewshot = record.config.fewshot;
    s.chain_of_thought = record.config.chain_of_thought;
    s.brainstorm = record.config.brainstorm;
    s.context_budget = record.config.context_budget;
    s.model = record.config.model;
    s.outcome = trial_outcome_name(record.outcome);
    s.iterations = static_cast<int>(record.iterations.size());
    for (auto it = record.iterations.rbegin(); it != record.iterations.rend(); ++it) {
        if (it->eval) {
            s.final_eval = *it->eval;
            break;
        }
    }
    return s;
}

void persist_trial(const TrialRecord& record, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    write_file(dir / "config.json", to_json(record.config).dump(2) + "\n");

    json sample{{"games", record.fewshot_sample.games},
                {"total_tokens", record.fewshot_sample.total_tokens},
                {"budget", record.fewshot_sample.budget}};
    if (record.fewshot_sample.stopped_by) sample["stopped_by"] = *record.fewshot_sample.stopped_by;
    write_file(dir / "sample.json", sample.dump(2) + "\n");

    if (record.idea) write_file(dir / "idea.txt", *record.idea + "\n");

    for (size_t i = 0; i < record.iterations.size(); ++i) {
        const IterationRecord& it = record.iterations[i];
        std::string k = std::to_string(i + 1);
        write_file(dir / ("prompt-" + k + ".txt"),
                   "=== SYSTEM ===\n" + it.prompt.system_text + "\n=== USER ===\n" +
                       it.prompt.user_text);
        write_file(dir / ("response-" + k + ".txt"), it.raw_response);
        if (it.extracted_source) write_file(dir / ("game-" + k + ".txt"), it.extracted_source->content);
        std::string diag;
        if (!it.repairs.empty()) {
            for (const auto& r : it.repairs) diag += "repair: " + r + "\n";
        }
        diag += format_diagnostics(it.syntax_diagnostics);
        diag += format_diagnostics(it.compile_diagnostics);
        write_file(dir / ("diagnostics-" + k + ".txt"), diag);
        if (it.eval) write_file(dir / ("eval-" + k + ".json"), to_json(*it.eval).dump(2) + "\n");
    }

    write_session_file(dir / "session.json", record.session_responses);

    TrialSummary s = summarize(record);
    json summary{{"config", to_json(record.config)},
                 {"outcome", s.outcome},
                 {"iterations", s.iterations},
                 {"final_eval", to_json(s.final_eval)}};
    if (record.success_iteration) summary["success_iteration"] = *record.success_iteration;
    if (!record.backend_error_message.empty())
        summary["backend_error"] = record.backend_error_message;
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

std::optional<TrialSummary> load_trial_summary(const std::filesystem::path& summary_json) {
    std::ifstream in(summary_json, std::ios::binary);
    if (!in) return std::nullopt;
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;

    TrialSummary s;
    json cfg = doc.value("config", json::object());
    s.fewshot = cfg.value("fewshot", false);
    s.chain_of_thought = cfg.value("chain_of_thought", false);
    s.brainstorm = cfg.value("brainstorm", false);
    s.context_budget = cfg.value("context_budget", 0);
    s.model = cfg.value("model", "");
    s.outcome = doc.value("outcome", "");
    s.iterations = doc.value("iterations", 0);
    s.final_eval = eval_from_json(doc.value("final_eval", json::object()));
    return s;
}

}  // namespace pskit
