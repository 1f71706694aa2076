#pragma once

// Step-by-step re-evaluation of the networks with plain loops over the raw
// parameter values. Nothing here calls the tensor library; tensors are only
// read to copy their numbers out.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "lvc/tensor.hpp"

namespace ref {

using Vec = std::vector<double>;

struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

inline Mat mat(const lvc::ad::Tensor& t) {
    return {t.rows(), t.cols(), std::vector<double>(t.data().begin(), t.data().end())};
}

inline Vec vec(const lvc::ad::Tensor& t) { return Vec(t.data().begin(), t.data().end()); }

inline double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// x (length rows) times M.
inline Vec times(const Vec& x, const Mat& m) {
    Vec out(m.cols, 0.0);
    for (std::size_t j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) s += x[i] * m(i, j);
        out[j] = s;
    }
    return out;
}

inline Vec join(const Vec& a, const Vec& b) {
    Vec out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

struct Lstm {
    Mat wx, wh;
    Vec b;
    std::size_t hidden = 0;
};

// Gate blocks: input, forget, candidate, output.
inline std::pair<Vec, Vec> lstm(const Lstm& p, const Vec& x, const Vec& h, const Vec& c) {
    const std::size_t H = p.hidden;
    Vec z(4 * H);
    for (std::size_t j = 0; j < 4 * H; ++j) {
        double s = p.b[j];
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * p.wx(i, j);
        for (std::size_t i = 0; i < H; ++i) s += h[i] * p.wh(i, j);
        z[j] = s;
    }
    Vec h2(H), c2(H);
    for (std::size_t u = 0; u < H; ++u) {
        const double ig = sigm(z[u]);
        const double fg = sigm(z[H + u]);
        const double g = std::tanh(z[2 * H + u]);
        const double og = sigm(z[3 * H + u]);
        c2[u] = fg * c[u] + ig * g;
        h2[u] = og * std::tanh(c2[u]);
    }
    return {h2, c2};
}

struct Attention {
    Mat wa;  // w x w
    Mat wc;  // 2w x w
};

struct AttentionOut {
    Vec alpha, context, h_tilde;
};

inline AttentionOut attend(const Attention& p, const Vec& hd, const std::vector<Vec>& hbar) {
    const std::size_t n = hbar.size(), w = hd.size();
    Vec proj = times(hd, p.wa);
    Vec score(n);
    double mx = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t d = 0; d < w; ++d) s += proj[d] * hbar[i][d];
        score[i] = s;
        mx = std::max(mx, s);
    }
    AttentionOut out;
    out.alpha.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += out.alpha[i] = std::exp(score[i] - mx);
    for (auto& a : out.alpha) a /= total;
    out.context.assign(w, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < w; ++d) out.context[d] += out.alpha[i] * hbar[i][d];
    out.h_tilde = times(join(out.context, hd), p.wc);
    for (auto& v : out.h_tilde) v = std::tanh(v);
    return out;
}

struct Affine {
    Mat w;
    Vec b;
};

inline Vec apply(const Affine& a, const Vec& x) {
    Vec y = times(x, a.w);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += a.b[j];
    return y;
}

struct Encoder {
    std::vector<Lstm> fwd, bwd;  // per layer
};

struct EncoderOut {
    std::vector<Vec> hbar;
    Vec final_h, final_c;
};

inline EncoderOut encode(const Encoder& e, std::vector<Vec> x) {
    const std::size_t n = x.size();
    EncoderOut out;
    for (std::size_t l = 0; l < e.fwd.size(); ++l) {
        const std::size_t H = e.fwd[l].hidden;
        std::vector<Vec> hf(n), cf(n), hb(n), cb(n);
        Vec h(H, 0.0), c(H, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            std::tie(h, c) = lstm(e.fwd[l], x[t], h, c);
            hf[t] = h;
            cf[t] = c;
        }
        h.assign(H, 0.0);
        c.assign(H, 0.0);
        for (std::size_t t = n; t-- > 0;) {
            std::tie(h, c) = lstm(e.bwd[l], x[t], h, c);
            hb[t] = h;
            cb[t] = c;
        }
        for (std::size_t t = 0; t < n; ++t) x[t] = join(hf[t], hb[t]);
        out.final_h = join(hf[n - 1], hb[0]);
        out.final_c = join(cf[n - 1], cb[0]);
    }
    out.hbar = x;
    return out;
}

struct Seq2Emo {
    Mat signals;  // k x D_S
    std::vector<Affine> fc_m, fc_o;
    Lstm fwd, bwd;
    Attention fwd_attn, bwd_attn;
};

// Attentional states in label order for one direction.
inline std::vector<Vec> run_direction(const Seq2Emo& m, const EncoderOut& enc, const Vec& moji, bool forward) {
    const std::size_t k = m.signals.rows;
    std::vector<Vec> by_label(k);
    Vec h = enc.final_h, c = enc.final_c;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t label = forward ? j : k - 1 - j;
        Vec s(m.signals.v.begin() + static_cast<std::ptrdiff_t>(label * m.signals.cols),
              m.signals.v.begin() + static_cast<std::ptrdiff_t>((label + 1) * m.signals.cols));
        const Vec x = join(s, ref::apply(m.fc_m[label], moji));
        auto [raw, c2] = lstm(forward ? m.fwd : m.bwd, x, h, c);
        h = attend(forward ? m.fwd_attn : m.bwd_attn, raw, enc.hbar).h_tilde;
        c = c2;
        by_label[label] = h;
    }
    return by_label;
}

inline std::vector<std::array<double, 2>> seq2emo_logits(const Seq2Emo& m, const EncoderOut& enc, const Vec& moji) {
    const auto f = run_direction(m, enc, moji, true);
    const auto b = run_direction(m, enc, moji, false);
    std::vector<std::array<double, 2>> out;
    for (std::size_t t = 0; t < f.size(); ++t) {
        const Vec z = ref::apply(m.fc_o[t], join(f[t], b[t]));
        out.push_back({z[0], z[1]});
    }
    return out;
}

struct Sgm {
    Mat embeddings;  // (k + 2) x D_L
    Lstm cell;
    Attention attn;
    Affine out;
};

inline std::vector<Vec> sgm_logits(const Sgm& m, const EncoderOut& enc, const std::vector<std::size_t>& inputs) {
    std::vector<Vec> out;
    Vec h = enc.final_h, c = enc.final_c;
    for (std::size_t row : inputs) {
        Vec x(m.embeddings.v.begin() + static_cast<std::ptrdiff_t>(row * m.embeddings.cols),
              m.embeddings.v.begin() + static_cast<std::ptrdiff_t>((row + 1) * m.embeddings.cols));
        auto [raw, c2] = lstm(m.cell, x, h, c);
        h = attend(m.attn, raw, enc.hbar).h_tilde;
        c = c2;
        out.push_back(ref::apply(m.out, h));
    }
    return out;
}

// -log softmax(z)[target]
inline double nll(const Vec& z, std::size_t target) {
    double mx = -INFINITY;
    for (double v : z) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    return -(z[target] - mx - std::log(s));
}

}  // namespace ref
