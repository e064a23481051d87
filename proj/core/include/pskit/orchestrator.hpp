#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pskit/backend.hpp"
#include "pskit/corpus.hpp"
#include "pskit/diagnostics.hpp"
#include "pskit/metrics.hpp"
#include "pskit/solver.hpp"
#include "pskit/source.hpp"

namespace pskit {

struct TrialConfig {
    int max_iterations = 10;
    bool fewshot = false;
    bool chain_of_thought = false;
    bool brainstorm = false;
    int context_budget = 30'000;  // token budget for the few-shot block
    SolverConfig solver;
    EvalThresholds eval;
    uint64_t rng_seed = 0;
    std::string model = "default";
    int max_output_tokens = 8192;
    double temperature = 1.0;
    // transport retry backoff, seconds; tests shrink these to zero
    std::vector<double> retry_backoff = {1.0, 2.0, 4.0};
};

struct Prompt {
    std::string system_text;
    std::string user_text;
};

struct IterationRecord {
    Prompt prompt;
    std::string raw_response;
    std::optional<SourceText> extracted_source;
    std::vector<std::string> repairs;
    std::vector<Diagnostic> syntax_diagnostics;
    std::vector<Diagnostic> compile_diagnostics;
    std::optional<GameEvalReport> eval;
    std::string feedback_rendered;  // nonempty iff failed and a next iteration exists
};

enum class TrialOutcome { success, failed_max_iterations, backend_error };
const char* trial_outcome_name(TrialOutcome o);

struct TrialRecord {
    TrialConfig config;
    FewshotSample fewshot_sample;
    std::optional<std::string> idea;  // brainstorm output
    std::vector<IterationRecord> iterations;
    TrialOutcome outcome = TrialOutcome::failed_max_iterations;
    std::optional<int> success_iteration;  // 1-based
    std::vector<std::string> session_responses;  // every raw backend response, in call order
    std::string backend_error_message;
};

/// Deterministic prompt assembly. System text = docs digest + few-shot game
/// sources in sample order; user text = task instruction, optional idea,
/// and on repair iterations the prior source and diagnostics verbatim.
Prompt build_prompt(const TrialConfig& config, const FewshotSample& sample, const Corpus* corpus,
                    const std::optional<std::string>& idea, const IterationRecord* prior);

/// Contents of the last fenced code block; without a fence, the whole
/// response iff it plausibly starts as PuzzleScript (section header or
/// prelude key), else nothing.
std::optional<SourceText> extract_code(const std::string& raw_response, const std::string& origin);

std::string brainstorm_instruction();

/// Renders the feedback block a failed iteration sends into the next
/// prompt: prior source, syntax diagnostics, compile diagnostics, and
/// per-level solver lines (broken levels first).
std::string render_feedback(const IterationRecord& iteration);

/// Runs the generate → repair → compile → solve loop for up to
/// config.max_iterations, stopping early on success (compiles and every
/// grid level solves with length > the all-solvable threshold).
TrialRecord run_trial(LlmBackend& backend, const Corpus* corpus, const TrialConfig& config);

TrialSummary summarize(const TrialRecord& record);

/// Writes config, per-iteration prompt/response/game/diagnostics/eval
/// files, session.json, and summary.json into `dir`. File contents carry
/// no timestamps, so a replayed trial reproduces them byte-for-byte.
void persist_trial(const TrialRecord& record, const std::filesystem::path& dir);

std::optional<TrialSummary> load_trial_summary(const std::filesystem::path& summary_json);

}  // namespace pskit
