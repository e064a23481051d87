#include "pskit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pskit/compiler.hpp"
#include "pskit/parser.hpp"

namespace pskit {

const CorpusEntry* Corpus::find(std::string_view id) const {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

int estimate_tokens(std::string_view text) {
    return static_cast<int>((text.size() + 3) / 4);  // ceil(bytes / 4)
}

Corpus load_corpus(const std::filesystem::path& directory, const TokenEstimator& estimator) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) {
        throw std::runtime_error("corpus directory not readable: " + directory.string());
    }
    TokenEstimator count = estimator ? estimator : TokenEstimator(&estimate_tokens);

    Corpus corpus;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) continue;
        std::ostringstream buf;
        buf << in.rdbuf();
        CorpusEntry e;
        e.id = entry.path().stem().string();
        e.source = make_source(buf.str(), e.id);
        e.token_count = count(e.source.content);
        ParseResult parsed = parse_game(e.source);
        e.parses = parsed.spec.has_value();
        if (e.parses) {
            CompileResult compiled = compile(*parsed.spec);
            e.compiles = compiled.game.has_value();
        }
        corpus.entries.push_back(std::move(e));
    }
    std::sort(corpus.entries.begin(), corpus.entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) { return a.id < b.id; });

    // optional sidecar: id<TAB>title
    std::ifstream meta(directory / "corpus.meta");
    if (meta) {
        std::string line;
        while (std::getline(meta, line)) {
            size_t tab = line.find('\t');
            if (tab == std::string::npos) continue;
            std::string id = line.substr(0, tab);
            for (auto& e : corpus.entries)
                if (e.id == id) e.title = line.substr(tab + 1);
        }
    }
    return corpus;
}

FewshotSample sample_fewshot(const Corpus& corpus, int budget, uint64_t rng_seed,
                             bool include_noncompiling) {
    FewshotSample sample;
    sample.budget = budget;

    std::vector<const CorpusEntry*> pool;
    for (const auto& e : corpus.entries) {
        if (e.compiles || (include_noncompiling && e.parses)) pool.push_back(&e);
    }

    std::mt19937_64 rng(rng_seed);
    // draw without replacement until the first overflowing game
    while (!pool.empty()) {
        size_t pick = static_cast<size_t>(rng() % pool.size());
        const CorpusEntry* e = pool[pick];
        pool.erase(pool.begin() + static_cast<long>(pick));
        if (sample.total_tokens + e->token_count > budget) {
            sample.stopped_by = e->id;
            break;
        }
        sample.games.push_back(e->id);
        sample.total_tokens += e->token_count;
    }
    return sample;
}

}  // namespace pskit
