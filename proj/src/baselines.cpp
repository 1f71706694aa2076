#include "lvc/baselines.hpp"

#include <cmath>
#include <limits>

#include "lvc/errors.hpp"

namespace lvc {

// ---- binary relevance ------------------------------------------------------

BrTwoCellHead BrTwoCellHead::init(std::size_t k, std::size_t width, Rng& rng) {
    BrTwoCellHead h;
    for (std::size_t j = 0; j < k; ++j) h.heads.push_back(Affine::init(width, 2, rng));
    return h;
}

ad::Tensor BrTwoCellHead::logits(ad::Tape& tape, const ad::Tensor& summary) const {
    std::vector<ad::Tensor> rows;
    rows.reserve(heads.size());
    for (const auto& head : heads) rows.push_back(head.apply(tape, summary));
    return ad::concat(tape, rows, 0);
}

void BrTwoCellHead::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    for (std::size_t j = 0; j < heads.size(); ++j) heads[j].collect(out, prefix + ".head" + std::to_string(j));
}

BrThresholdHead BrThresholdHead::init(std::size_t k, std::size_t width, double tau, Rng& rng) {
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
    BrThresholdHead h;
    h.tau = tau;
    for (std::size_t j = 0; j < k; ++j) h.heads.push_back(Affine::init(width, 1, rng));
    return h;
}

ad::Tensor BrThresholdHead::logits(ad::Tape& tape, const ad::Tensor& summary) const {
    std::vector<ad::Tensor> rows;
    rows.reserve(heads.size());
    for (const auto& head : heads) rows.push_back(head.apply(tape, summary));
    return ad::concat(tape, rows, 0);
}

void BrThresholdHead::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    for (std::size_t j = 0; j < heads.size(); ++j) heads[j].collect(out, prefix + ".head" + std::to_string(j));
}

BinaryLabelVector br_predict(const ad::Tensor& logits, BrVariant variant, double tau) {
    const std::size_t want = variant == BrVariant::two_cell ? 2 : 1;
    if (logits.rank() != 2 || logits.cols() != want) {
        throw DimensionError("br_predict: logits " + ad::shape_string(logits.shape()));
    }
    BinaryLabelVector bits(logits.rows());
    for (std::size_t j = 0; j < logits.rows(); ++j) {
        if (variant == BrVariant::two_cell) {
            bits.set(j, logits.at(j, 0) < logits.at(j, 1));
        } else {
            const double p = 1.0 / (1.0 + std::exp(-logits.at(j, 0)));
            bits.set(j, p > tau);
        }
    }
    return bits;
}

ad::Tensor br_two_cell_loss(ad::Tape& tape, const ad::Tensor& logits, const BinaryLabelVector& gold) {
    if (logits.rank() != 2 || logits.cols() != 2 || logits.rows() != gold.size()) {
        throw ContractError("br loss: logits " + ad::shape_string(logits.shape()) + " for " +
                            std::to_string(gold.size()) + " labels");
    }
    std::vector<ad::Tensor> terms;
    for (std::size_t j = 0; j < gold.size(); ++j)
        terms.push_back(ad::cross_entropy_2class(tape, ad::row(tape, logits, j), gold[j] ? 1 : 0));
    return ad::scale(tape, ad::add_n(tape, terms), 1.0 / static_cast<double>(gold.size()));
}

ad::Tensor br_threshold_loss(ad::Tape& tape, const ad::Tensor& logits, const BinaryLabelVector& gold) {
    if (logits.rank() != 2 || logits.cols() != 1 || logits.rows() != gold.size()) {
        throw ContractError("br loss: logits " + ad::shape_string(logits.shape()) + " for " +
                            std::to_string(gold.size()) + " labels");
    }
    std::vector<ad::Tensor> terms;
    for (std::size_t j = 0; j < gold.size(); ++j)
        terms.push_back(ad::binary_cross_entropy_with_logit(tape, ad::row(tape, logits, j), gold[j] ? 1 : 0));
    return ad::scale(tape, ad::add_n(tape, terms), 1.0 / static_cast<double>(gold.size()));
}

// ---- SGM -------------------------------------------------------------------

SgmTarget::SgmTarget(std::vector<std::size_t> labels, std::size_t k) : labels_(std::move(labels)), k_(k) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] >= k_) throw ContractError("sgm target: label " + std::to_string(labels_[i]) + " outside label space");
        if (i > 0 && labels_[i] <= labels_[i - 1]) {
            throw ContractError("sgm target: labels must be unique and in label-space order");
        }
    }
}

SgmTarget SgmTarget::from_bits(const BinaryLabelVector& bits) {
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) labels.push_back(i);
    }
    return SgmTarget(std::move(labels), bits.size());
}

std::vector<std::size_t> SgmTarget::inputs() const {
    std::vector<std::size_t> in{k_};
    in.insert(in.end(), labels_.begin(), labels_.end());
    return in;
}

std::vector<std::size_t> SgmTarget::targets() const {
    std::vector<std::size_t> out(labels_);
    out.push_back(k_);
    return out;
}

SgmDecoder SgmDecoder::init(std::size_t k, std::size_t width, std::size_t label_dim, Rng& rng) {
    if (k == 0) throw ConfigError("sgm: label count must be positive");
    SgmDecoder d;
    d.label_embeddings = ad::Tensor::uniform({k + 2, label_dim}, -0.1, 0.1, rng, true);
    d.cell = LstmCellParams::init(label_dim, width, rng);
    d.attention = AttentionParams::init(width, rng);
    d.output = Affine::init(width, k + 1, rng);
    return d;
}

void SgmDecoder::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    out.push_back({prefix + ".label_embeddings", label_embeddings});
    cell.collect(out, prefix + ".cell");
    attention.collect(out, prefix + ".attn");
    output.collect(out, prefix + ".out");
}

namespace {

struct SgmState {
    ad::Tensor h_tilde;
    ad::Tensor c;
};

ad::Tensor sgm_step(ad::Tape& tape, const EncoderOutput& enc, const SgmDecoder& decoder, std::size_t input_row,
                    SgmState& state) {
    const ad::Tensor x = ad::row(tape, decoder.label_embeddings, input_row);
    const LstmState raw = lstm_cell_step(tape, x, state.h_tilde, state.c, decoder.cell);
    state.h_tilde = attend(tape, raw.h, enc.hbar, decoder.attention).h_tilde;
    state.c = raw.c;
    return decoder.output.apply(tape, state.h_tilde);
}

std::vector<double> softmax_values(std::span<const double> z) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : z) mx = std::max(mx, v);
    std::vector<double> p(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) total += (p[i] = std::exp(z[i] - mx));
    for (auto& v : p) v /= total;
    return p;
}

}  // namespace

std::vector<ad::Tensor> sgm_step_logits(ad::Tape& tape, const EncoderOutput& enc, const SgmDecoder& decoder,
                                        std::span<const std::size_t> inputs) {
    if (enc.final_h.size() != decoder.cell.hidden_dim) {
        throw DimensionError("sgm: encoder width " + std::to_string(enc.final_h.size()) + " does not match decoder width " +
                             std::to_string(decoder.cell.hidden_dim));
    }
    SgmState state{enc.final_h, enc.final_c};
    std::vector<ad::Tensor> logits;
    for (std::size_t row : inputs) logits.push_back(sgm_step(tape, enc, decoder, row, state));
    return logits;
}

ad::Tensor sgm_train_loss(ad::Tape& tape, const EncoderOutput& enc, const SgmDecoder& decoder, const SgmTarget& gold) {
    if (gold.k() != decoder.k()) throw ContractError("sgm: target label count does not match decoder");
    const auto inputs = gold.inputs();
    const auto targets = gold.targets();
    const auto logits = sgm_step_logits(tape, enc, decoder, inputs);
    std::vector<ad::Tensor> terms;
    for (std::size_t t = 0; t < targets.size(); ++t) terms.push_back(ad::cross_entropy(tape, logits[t], targets[t]));
    return ad::add_n(tape, terms);
}

SgmDecodeTrace sgm_decode_greedy(const EncoderOutput& enc, const SgmDecoder& decoder, std::size_t max_steps) {
    const std::size_t k = decoder.k();
    if (max_steps == 0) max_steps = k + 1;
    ad::Tape tape(false);
    SgmState state{enc.final_h, enc.final_c};
    SgmDecodeTrace trace;
    trace.labels = BinaryLabelVector(k);
    std::size_t input = decoder.start_row();
    for (std::size_t step = 0; step < max_steps; ++step) {
        const ad::Tensor logits = sgm_step(tape, enc, decoder, input, state);
        trace.distributions.push_back(softmax_values(logits.data()));
        std::size_t best = decoder.end_class();
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t cls = 0; cls <= k; ++cls) {
            if (cls < k && trace.labels[cls]) continue;  // already emitted
            if (logits.at(cls) > best_score) {
                best_score = logits.at(cls);
                best = cls;
            }
        }
        trace.emitted.push_back(best);
        if (best == decoder.end_class()) break;
        trace.labels.set(best, true);
        input = decoder.row_for_class(best);
    }
    return trace;
}

}  // namespace lvc
