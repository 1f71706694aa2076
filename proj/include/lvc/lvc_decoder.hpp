#pragma once

// Latent-variable-chain decoding. Two single-layer LSTM decoders walk the
// label positions in opposite orders. Each step consumes a per-label signal
// vector and a per-label projection of the instance-level feature, never a
// previous prediction; the chain runs through the hidden states only.

#include <string>
#include <vector>

#include "lvc/affine.hpp"
#include "lvc/attention.hpp"
#include "lvc/encoder.hpp"
#include "lvc/labels.hpp"

namespace lvc {

// One trainable vector per label position, shared by both directions.
struct SignalTable {
    ad::Tensor signals;  // k x D_S

    static SignalTable init(std::size_t k, std::size_t dim, Rng& rng);
    std::size_t size() const { return signals.rows(); }
    std::size_t dim() const { return signals.cols(); }
};

struct PerLabelHeads {
    std::vector<Affine> fc_m;  // k maps D_M -> D_F
    std::vector<Affine> fc_o;  // k maps 2*width -> 2
};

struct LvcDecoderParams {
    LstmCellParams forward;   // input D_S + D_F, hidden width (= 2H)
    LstmCellParams backward;
    AttentionParams forward_attention;
    AttentionParams backward_attention;
};

struct Seq2EmoDecoder {
    SignalTable signals;
    PerLabelHeads heads;
    LvcDecoderParams params;

    // width is the encoder output width 2H, used as the decoder hidden size.
    static Seq2EmoDecoder init(std::size_t k, std::size_t width, std::size_t signal_dim, std::size_t moji_proj_dim,
                               std::size_t moji_dim, Rng& rng);

    std::size_t k() const { return signals.size(); }
    std::size_t width() const { return params.forward.hidden_dim; }
    std::size_t moji_dim() const { return heads.fc_m.front().in_dim(); }

    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

enum class Direction { forward, backward };

// Label positions in the order a direction consumes them: forward 0..k-1,
// backward k-1..0.
std::vector<std::size_t> consumption_order(std::size_t k, Direction direction);

// Runs one decoder. The state starts from (enc.final_h, enc.final_c); step j
// feeds [s_l; FC^m_l(moji)] for label l = consumption_order[j] and the
// previous attentional state, then refines the raw state by attention.
// Returns the k attentional states (1 x width) in consumption order.
std::vector<ad::Tensor> decode_one_direction(ad::Tape& tape, const EncoderOutput& enc, const Seq2EmoDecoder& decoder,
                                             const ad::Tensor& moji, Direction direction);

// k x 2 logits; row t = FC^o_t([forward state for label t; backward state for label t]).
ad::Tensor lvc_logits(ad::Tape& tape, const EncoderOutput& enc, const Seq2EmoDecoder& decoder, const ad::Tensor& moji);

// Bit t = 1 iff logits[t, 1] > logits[t, 0]; exact ties give 0.
BinaryLabelVector predict(const ad::Tensor& logits);

// Mean over label positions of the two-class cross-entropy.
ad::Tensor lvc_loss(ad::Tape& tape, const ad::Tensor& logits, const BinaryLabelVector& gold);

}  // namespace lvc
