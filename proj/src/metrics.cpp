#include "lvc/metrics.hpp"

#include <cstdio>
#include <ostream>

#include "lvc/errors.hpp"

namespace lvc {

EvalBatch::EvalBatch(std::vector<BinaryLabelVector> gold, std::vector<BinaryLabelVector> pred)
    : gold_(std::move(gold)), pred_(std::move(pred)) {
    if (gold_.empty()) throw ContractError("evaluation batch is empty");
    if (gold_.size() != pred_.size()) {
        throw ContractError("evaluation batch: " + std::to_string(gold_.size()) + " gold vectors, " +
                            std::to_string(pred_.size()) + " predictions");
    }
    k_ = gold_.front().size();
    for (std::size_t i = 0; i < gold_.size(); ++i) {
        if (gold_[i].size() != k_ || pred_[i].size() != k_) {
            throw ContractError("evaluation batch: instance " + std::to_string(i) + " has the wrong label count");
        }
    }
}

double jaccard(const EvalBatch& batch) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.n(); ++i) {
        std::size_t inter = 0, uni = 0;
        for (std::size_t j = 0; j < batch.k(); ++j) {
            const bool g = batch.gold()[i][j], p = batch.pred()[i][j];
            inter += g && p;
            uni += g || p;
        }
        total += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return total / static_cast<double>(batch.n());
}

double hamming_loss(const EvalBatch& batch) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < batch.n(); ++i)
        for (std::size_t j = 0; j < batch.k(); ++j) wrong += batch.gold()[i][j] != batch.pred()[i][j];
    return static_cast<double>(wrong) / static_cast<double>(batch.n() * batch.k());
}

double micro_f1(const EvalBatch& batch) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < batch.n(); ++i) {
        for (std::size_t j = 0; j < batch.k(); ++j) {
            const bool g = batch.gold()[i][j], p = batch.pred()[i][j];
            tp += g && p;
            fp += !g && p;
            fn += g && !p;
        }
    }
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

MacroScores macro_prf(std::span<const std::size_t> gold, std::span<const std::size_t> pred, std::size_t k) {
    if (gold.size() != pred.size() || gold.empty()) throw ContractError("macro_prf: mismatched or empty inputs");
    if (k == 0) throw ContractError("macro_prf: k must be positive");
    std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] >= k || pred[i] >= k) throw ContractError("macro_prf: class id outside [0, k)");
        if (gold[i] == pred[i]) {
            ++tp[gold[i]];
            ++correct;
        } else {
            ++fp[pred[i]];
            ++fn[gold[i]];
        }
    }
    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    MacroScores s;
    for (std::size_t c = 0; c < k; ++c) {
        const double p = ratio(tp[c], tp[c] + fp[c]);
        const double r = ratio(tp[c], tp[c] + fn[c]);
        s.precision += p;
        s.recall += r;
        s.f1 += p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
    s.precision /= static_cast<double>(k);
    s.recall /= static_cast<double>(k);
    s.f1 /= static_cast<double>(k);
    // Every single-label decision is one TP or one FP/FN pair.
    s.micro_f1 = ratio(correct, gold.size());
    return s;
}

void MetricReport::write(std::ostream& out) const {
    char buf[64];
    for (const auto& [name, value] : values) {
        std::snprintf(buf, sizeof buf, "%.6f", value);
        out << name << '\t' << buf << '\n';
    }
}

MetricReport multilabel_report(const EvalBatch& batch) {
    return {{{"jaccard", jaccard(batch)}, {"hamming_loss", hamming_loss(batch)}, {"micro_f1", micro_f1(batch)}}};
}

}  // namespace lvc
