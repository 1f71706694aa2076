#include "lvc/lvc_decoder.hpp"

#include "lvc/errors.hpp"

namespace lvc {

SignalTable SignalTable::init(std::size_t k, std::size_t dim, Rng& rng) {
    return {ad::Tensor::uniform({k, dim}, -0.1, 0.1, rng, true)};
}

Seq2EmoDecoder Seq2EmoDecoder::init(std::size_t k, std::size_t width, std::size_t signal_dim,
                                    std::size_t moji_proj_dim, std::size_t moji_dim, Rng& rng) {
    if (k == 0) throw ConfigError("decoder: label count must be positive");
    Seq2EmoDecoder d;
    d.signals = SignalTable::init(k, signal_dim, rng);
    for (std::size_t t = 0; t < k; ++t) d.heads.fc_m.push_back(Affine::init(moji_dim, moji_proj_dim, rng));
    for (std::size_t t = 0; t < k; ++t) d.heads.fc_o.push_back(Affine::init(2 * width, 2, rng));
    const std::size_t input = signal_dim + moji_proj_dim;
    d.params.forward = LstmCellParams::init(input, width, rng);
    d.params.backward = LstmCellParams::init(input, width, rng);
    d.params.forward_attention = AttentionParams::init(width, rng);
    d.params.backward_attention = AttentionParams::init(width, rng);
    return d;
}

void Seq2EmoDecoder::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    out.push_back({prefix + ".signals", signals.signals});
    for (std::size_t t = 0; t < heads.fc_m.size(); ++t) heads.fc_m[t].collect(out, prefix + ".fc_m" + std::to_string(t));
    for (std::size_t t = 0; t < heads.fc_o.size(); ++t) heads.fc_o[t].collect(out, prefix + ".fc_o" + std::to_string(t));
    params.forward.collect(out, prefix + ".fwd");
    params.backward.collect(out, prefix + ".bwd");
    params.forward_attention.collect(out, prefix + ".fwd_attn");
    params.backward_attention.collect(out, prefix + ".bwd_attn");
}

std::vector<std::size_t> consumption_order(std::size_t k, Direction direction) {
    std::vector<std::size_t> order(k);
    for (std::size_t j = 0; j < k; ++j) order[j] = direction == Direction::forward ? j : k - 1 - j;
    return order;
}

std::vector<ad::Tensor> decode_one_direction(ad::Tape& tape, const EncoderOutput& enc, const Seq2EmoDecoder& decoder,
                                             const ad::Tensor& moji, Direction direction) {
    if (moji.size() != decoder.moji_dim()) {
        throw DataError("decoder: instance feature has dimension " + std::to_string(moji.size()) + ", expected " +
                        std::to_string(decoder.moji_dim()));
    }
    const bool fwd = direction == Direction::forward;
    const LstmCellParams& cell = fwd ? decoder.params.forward : decoder.params.backward;
    const AttentionParams& attention = fwd ? decoder.params.forward_attention : decoder.params.backward_attention;
    if (enc.final_h.size() != cell.hidden_dim) {
        throw DimensionError("decoder: encoder width " + std::to_string(enc.final_h.size()) +
                             " does not match decoder width " + std::to_string(cell.hidden_dim));
    }
    const ad::Tensor moji_row = moji.rank() == 2 ? moji : ad::Tensor::from({1, moji.size()}, {moji.data().begin(), moji.data().end()});

    std::vector<ad::Tensor> states;
    ad::Tensor h_tilde = enc.final_h;
    ad::Tensor c = enc.final_c;
    for (std::size_t label : consumption_order(decoder.k(), direction)) {
        const ad::Tensor signal = ad::row(tape, decoder.signals.signals, label);
        const ad::Tensor projected = decoder.heads.fc_m[label].apply(tape, moji_row);
        const ad::Tensor x = ad::concat(tape, {signal, projected}, 1);
        const LstmState raw = lstm_cell_step(tape, x, h_tilde, c, cell);
        h_tilde = attend(tape, raw.h, enc.hbar, attention).h_tilde;
        c = raw.c;
        states.push_back(h_tilde);
    }
    return states;
}

ad::Tensor lvc_logits(ad::Tape& tape, const EncoderOutput& enc, const Seq2EmoDecoder& decoder, const ad::Tensor& moji) {
    const std::size_t k = decoder.k();
    const auto forward = decode_one_direction(tape, enc, decoder, moji, Direction::forward);
    const auto backward = decode_one_direction(tape, enc, decoder, moji, Direction::backward);
    std::vector<ad::Tensor> rows;
    rows.reserve(k);
    for (std::size_t t = 0; t < k; ++t) {
        // backward consumed label t at step k-1-t
        const ad::Tensor pair = ad::concat(tape, {forward[t], backward[k - 1 - t]}, 1);
        rows.push_back(decoder.heads.fc_o[t].apply(tape, pair));
    }
    return ad::concat(tape, rows, 0);
}

BinaryLabelVector predict(const ad::Tensor& logits) {
    if (logits.rank() != 2 || logits.cols() != 2) {
        throw DimensionError("predict: expected k x 2 logits, got " + ad::shape_string(logits.shape()));
    }
    BinaryLabelVector bits(logits.rows());
    for (std::size_t t = 0; t < logits.rows(); ++t) bits.set(t, logits.at(t, 1) > logits.at(t, 0));
    return bits;
}

ad::Tensor lvc_loss(ad::Tape& tape, const ad::Tensor& logits, const BinaryLabelVector& gold) {
    if (logits.rank() != 2 || logits.cols() != 2 || logits.rows() != gold.size()) {
        throw ContractError("lvc_loss: logits " + ad::shape_string(logits.shape()) + " for " +
                            std::to_string(gold.size()) + " gold labels");
    }
    std::vector<ad::Tensor> terms;
    terms.reserve(gold.size());
    for (std::size_t t = 0; t < gold.size(); ++t) {
        terms.push_back(ad::cross_entropy_2class(tape, ad::row(tape, logits, t), gold[t] ? 1 : 0));
    }
    return ad::scale(tape, ad::add_n(tape, terms), 1.0 / static_cast<double>(gold.size()));
}

}  // namespace lvc
