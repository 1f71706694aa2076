#pragma once

// Baseline transformations over the same encoder: binary relevance heads in
// both variants, and an SGM-style sequence decoder that emits the ordered
// positive label set one label at a time.

#include <string>
#include <vector>

#include "lvc/affine.hpp"
#include "lvc/attention.hpp"
#include "lvc/encoder.hpp"
#include "lvc/labels.hpp"

namespace lvc {

// k independent two-cell classifiers over the encoder summary.
struct BrTwoCellHead {
    std::vector<Affine> heads;  // width -> 2

    static BrTwoCellHead init(std::size_t k, std::size_t width, Rng& rng);
    std::size_t k() const { return heads.size(); }
    ad::Tensor logits(ad::Tape& tape, const ad::Tensor& summary) const;  // k x 2
    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

// k single-cell classifiers; bit j = 1(sigmoid(b_j) > tau).
struct BrThresholdHead {
    std::vector<Affine> heads;  // width -> 1
    double tau = 0.5;

    static BrThresholdHead init(std::size_t k, std::size_t width, double tau, Rng& rng);
    std::size_t k() const { return heads.size(); }
    ad::Tensor logits(ad::Tape& tape, const ad::Tensor& summary) const;  // k x 1
    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

enum class BrVariant { two_cell, threshold };

// Two-cell: logits is k x 2 and bit j = 1(b_j^0 < b_j^1). Threshold: logits
// is k x 1 and bit j = 1(sigmoid(b_j) > tau).
BinaryLabelVector br_predict(const ad::Tensor& logits, BrVariant variant, double tau = 0.5);

ad::Tensor br_two_cell_loss(ad::Tape& tape, const ad::Tensor& logits, const BinaryLabelVector& gold);
ad::Tensor br_threshold_loss(ad::Tape& tape, const ad::Tensor& logits, const BinaryLabelVector& gold);

// Positive labels of an instance in label-space order, framed by <s> and <eos>.
class SgmTarget {
public:
    // Throws ContractError unless `labels` is strictly increasing and < k.
    SgmTarget(std::vector<std::size_t> labels, std::size_t k);
    static SgmTarget from_bits(const BinaryLabelVector& bits);

    const std::vector<std::size_t>& labels() const { return labels_; }
    std::size_t k() const { return k_; }
    // Decoder inputs: <s>, l_1, ..., l_m (embedding row ids).
    std::vector<std::size_t> inputs() const;
    // Prediction targets: l_1, ..., l_m, <eos> (output class ids).
    std::vector<std::size_t> targets() const;

private:
    std::vector<std::size_t> labels_;
    std::size_t k_;
};

// Embedding rows: labels 0..k-1, <s> = k, <eos> = k+1.
// Output classes: labels 0..k-1, <eos> = k.
struct SgmDecoder {
    ad::Tensor label_embeddings;  // (k + 2) x D_L
    LstmCellParams cell;          // D_L -> width
    AttentionParams attention;
    Affine output;                // width -> k + 1

    static SgmDecoder init(std::size_t k, std::size_t width, std::size_t label_dim, Rng& rng);

    std::size_t k() const { return label_embeddings.rows() - 2; }
    std::size_t start_row() const { return k(); }
    std::size_t end_row() const { return k() + 1; }
    std::size_t end_class() const { return k(); }
    // Embedding row for an output class.
    std::size_t row_for_class(std::size_t cls) const { return cls == end_class() ? end_row() : cls; }

    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

// Logits (1 x (k+1)) for each step when the decoder is fed `inputs`
// (embedding row ids) one per step, starting from the encoder final state.
std::vector<ad::Tensor> sgm_step_logits(ad::Tape& tape, const EncoderOutput& enc, const SgmDecoder& decoder,
                                        std::span<const std::size_t> inputs);

// Teacher forcing: sum over steps of the cross-entropy of predicting gold
// token t+1 from gold token t.
ad::Tensor sgm_train_loss(ad::Tape& tape, const EncoderOutput& enc, const SgmDecoder& decoder, const SgmTarget& gold);

struct SgmDecodeTrace {
    BinaryLabelVector labels;
    std::vector<std::size_t> emitted;                 // classes in emission order, <eos> included if reached
    std::vector<std::vector<double>> distributions;   // softmax before masking, per step
};

// Free-running greedy decoding: feeds back its own argmax, masks labels it
// already emitted, and stops at <eos> or after max_steps (0 means k + 1).
SgmDecodeTrace sgm_decode_greedy(const EncoderOutput& enc, const SgmDecoder& decoder, std::size_t max_steps = 0);

}  // namespace lvc
