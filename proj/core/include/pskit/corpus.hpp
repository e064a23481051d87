#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pskit/source.hpp"

namespace pskit {

struct CorpusEntry {
    std::string id;  // file stem
    SourceText source;
    int token_count = 0;
    bool parses = false;
    bool compiles = false;
    std::optional<std::string> title;  // from corpus.meta sidecar
};

struct Corpus {
    std::vector<CorpusEntry> entries;  // sorted by id

    const CorpusEntry* find(std::string_view id) const;
};

/// Default token estimator: ceil(bytes / 4). Pluggable so an exact model
/// tokenizer can be swapped in.
using TokenEstimator = std::function<int(std::string_view)>;
int estimate_tokens(std::string_view text);

/// Loads every *.txt in a flat directory; id = file stem. Reads an optional
/// `corpus.meta` sidecar (`id<TAB>title` lines). Throws std::runtime_error
/// when the directory cannot be read; an empty corpus is not an error.
Corpus load_corpus(const std::filesystem::path& directory, const TokenEstimator& estimator = {});

struct FewshotSample {
    std::vector<std::string> games;  // corpus ids in sampling (= prompt) order
    int total_tokens = 0;
    int budget = 0;
    std::optional<std::string> stopped_by;  // first draw that would have overflowed
};

/// Uniform draws without replacement from the compiling pool (all parsing
/// entries when include_noncompiling is set), appending while the budget
/// holds and stopping at the first draw that would exceed it.
/// Deterministic for a fixed (corpus, budget, seed).
FewshotSample sample_fewshot(const Corpus& corpus, int budget, uint64_t rng_seed,
                             bool include_noncompiling = false);

}  // namespace pskit
