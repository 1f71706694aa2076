#pragma once

// Toy multi-label data with keyword-determined labels, for overfitting and
// smoke tests. Vocabulary w00..w49, labels label1..label4.

#include <cstdint>
#include <string>
#include <vector>

#include "lvc/corpus.hpp"

namespace lvc {

enum class SynthKind {
    correlated,   // label4 always equals label1
    independent,  // label4 has its own keywords and coin flip
};

SynthKind parse_synth_kind(const std::string& name);
LabelSpace synth_labels();

// Labels 1-3 (and label4 when independent) are each present with
// probability 1/2. Every present label contributes one or two of its three
// keywords; the rest of the 6-12 tokens are filler words.
std::vector<CorpusRecord> synthesize(SynthKind kind, std::uint64_t seed, std::size_t count = 200);

}  // namespace lvc
