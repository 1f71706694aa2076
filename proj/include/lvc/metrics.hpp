#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lvc/labels.hpp"

namespace lvc {

// Gold and predicted label vectors for N instances over k labels.
class EvalBatch {
public:
    EvalBatch(std::vector<BinaryLabelVector> gold, std::vector<BinaryLabelVector> pred);

    std::size_t n() const { return gold_.size(); }
    std::size_t k() const { return k_; }
    const std::vector<BinaryLabelVector>& gold() const { return gold_; }
    const std::vector<BinaryLabelVector>& pred() const { return pred_; }

private:
    std::vector<BinaryLabelVector> gold_;
    std::vector<BinaryLabelVector> pred_;
    std::size_t k_ = 0;
};

// Mean of |Y n Y'| / |Y u Y'|; an instance with both sets empty scores 1.
double jaccard(const EvalBatch& batch);
// Fraction of the N*k bits that disagree.
double hamming_loss(const EvalBatch& batch);
// 2TP / (2TP + FP + FN) over all decisions; 0 when nothing is positive.
double micro_f1(const EvalBatch& batch);

struct MacroScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double micro_f1 = 0.0;
};

// Single-label scores over k classes. Per-class values with a zero
// denominator count as 0 in the unweighted average.
MacroScores macro_prf(std::span<const std::size_t> gold, std::span<const std::size_t> pred, std::size_t k);

struct MetricReport {
    std::vector<std::pair<std::string, double>> values;
    void write(std::ostream& out) const;  // "name\tvalue" lines, 6 decimals
};

MetricReport multilabel_report(const EvalBatch& batch);

}  // namespace lvc
