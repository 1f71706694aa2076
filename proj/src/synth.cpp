#include "lvc/synth.hpp"

#include <cstdio>

#include "lvc/errors.hpp"
#include "lvc/rng.hpp"
#include "lvc/strings.hpp"

namespace lvc {

namespace {

constexpr std::size_t kVocab = 50;
constexpr std::size_t kKeywordsPerLabel = 3;
constexpr std::size_t kKeywordLabels = 4;

std::string word(std::size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "w%02zu", i);
    return buf;
}

}  // namespace

SynthKind parse_synth_kind(const std::string& name) {
    if (name == "correlated") return SynthKind::correlated;
    if (name == "independent") return SynthKind::independent;
    throw ConfigError("unknown synthetic kind '" + name + "' (expected correlated or independent)");
}

LabelSpace synth_labels() { return LabelSpace({"label1", "label2", "label3", "label4"}); }

std::vector<CorpusRecord> synthesize(SynthKind kind, std::uint64_t seed, std::size_t count) {
    const LabelSpace labels = synth_labels();
    // Correlated data has no label4 keywords, so w09..w11 become filler.
    const std::size_t keyword_labels = kind == SynthKind::correlated ? kKeywordLabels - 1 : kKeywordLabels;
    const std::size_t first_filler = keyword_labels * kKeywordsPerLabel;
    Rng rng(seed);
    std::vector<CorpusRecord> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        bool on[4];
        for (std::size_t j = 0; j < 3; ++j) on[j] = uniform01(rng) < 0.5;
        on[3] = kind == SynthKind::correlated ? on[0] : uniform01(rng) < 0.5;

        std::vector<std::string> tokens;
        for (std::size_t j = 0; j < 4; ++j) {
            if (!on[j]) continue;
            // label4 in the correlated set has no keywords of its own.
            if (j == 3 && kind == SynthKind::correlated) continue;
            const std::size_t uses = 1 + uniform_index(rng, 2);
            for (std::size_t u = 0; u < uses; ++u) {
                tokens.push_back(word(j * kKeywordsPerLabel + uniform_index(rng, kKeywordsPerLabel)));
            }
        }
        const std::size_t length = std::max<std::size_t>(tokens.size(), 6 + uniform_index(rng, 7));
        while (tokens.size() < length) tokens.push_back(word(first_filler + uniform_index(rng, kVocab - first_filler)));
        shuffle(tokens, rng);

        CorpusRecord r;
        char id[24];
        std::snprintf(id, sizeof id, "s%03zu", n + 1);
        r.id = id;
        r.text = str::join(tokens, " ");
        r.tokens = tokens;
        for (std::size_t j = 0; j < 4; ++j) {
            if (on[j]) r.labels.insert(labels.name(j));
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace lvc
