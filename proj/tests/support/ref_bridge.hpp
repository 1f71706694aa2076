#pragma once

// Copies parameter values out of the production structs into the plain
// reference structs, and fills parameters with fixed hand-chosen patterns.

#include <cmath>

#include "lvc/baselines.hpp"
#include "lvc/encoder.hpp"
#include "lvc/lvc_decoder.hpp"
#include "support/reference_nets.hpp"

namespace ref {

// Deterministic, irregular values in (-0.8, 0.8); no RNG involved.
inline void handset(lvc::ad::Tensor t, double phase) {
    auto v = t.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = static_cast<double>(i);
        v[i] = 0.6 * std::sin(0.9 * x + phase) + 0.2 * std::cos(2.3 * x - 1.7 * phase);
    }
}

inline void handset(const std::vector<lvc::ad::NamedTensor>& params, double phase) {
    for (std::size_t i = 0; i < params.size(); ++i) handset(params[i].tensor, phase + 0.37 * static_cast<double>(i));
}

inline Lstm from(const lvc::LstmCellParams& p) { return {mat(p.w_input), mat(p.w_hidden), vec(p.bias), p.hidden_dim}; }

inline Attention from(const lvc::AttentionParams& p) { return {mat(p.score), mat(p.combine)}; }

inline Affine from(const lvc::Affine& a) { return {mat(a.weight), vec(a.bias)}; }

inline Encoder from(const lvc::EncoderParams& e) {
    Encoder out;
    for (const auto& l : e.forward) out.fwd.push_back(from(l));
    for (const auto& l : e.backward) out.bwd.push_back(from(l));
    return out;
}

inline Seq2Emo from(const lvc::Seq2EmoDecoder& d) {
    Seq2Emo m;
    m.signals = mat(d.signals.signals);
    for (const auto& a : d.heads.fc_m) m.fc_m.push_back(from(a));
    for (const auto& a : d.heads.fc_o) m.fc_o.push_back(from(a));
    m.fwd = from(d.params.forward);
    m.bwd = from(d.params.backward);
    m.fwd_attn = from(d.params.forward_attention);
    m.bwd_attn = from(d.params.backward_attention);
    return m;
}

inline Sgm from(const lvc::SgmDecoder& d) {
    return {mat(d.label_embeddings), from(d.cell), from(d.attention), from(d.output)};
}

inline std::vector<Vec> rows(const lvc::ad::Tensor& t) {
    std::vector<Vec> out;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        Vec row;
        for (std::size_t c = 0; c < t.cols(); ++c) row.push_back(t.at(r, c));
        out.push_back(row);
    }
    return out;
}

}  // namespace ref
