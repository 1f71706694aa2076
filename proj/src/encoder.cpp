#include "lvc/encoder.hpp"

#include <cmath>

#include "lvc/errors.hpp"

namespace lvc {

LstmCellParams LstmCellParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    LstmCellParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.w_input = ad::Tensor::zeros({input_dim, 4 * hidden_dim}, true);
    p.w_hidden = ad::Tensor::zeros({hidden_dim, 4 * hidden_dim}, true);
    p.bias = ad::Tensor::zeros({1, 4 * hidden_dim}, true);
    for (std::size_t j = hidden_dim; j < 2 * hidden_dim; ++j) p.bias.data()[j] = 1.0;
    return p;
}

LstmCellParams LstmCellParams::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
    LstmCellParams p = zeros(input_dim, hidden_dim);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    p.w_input = ad::Tensor::uniform({input_dim, 4 * hidden_dim}, -r, r, rng, true);
    p.w_hidden = ad::Tensor::uniform({hidden_dim, 4 * hidden_dim}, -r, r, rng, true);
    return p;
}

void LstmCellParams::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    out.push_back({prefix + ".w_input", w_input});
    out.push_back({prefix + ".w_hidden", w_hidden});
    out.push_back({prefix + ".bias", bias});
}

LstmState lstm_cell_step_projected(ad::Tape& tape, const ad::Tensor& x_projected, const ad::Tensor& h_prev,
                                   const ad::Tensor& c_prev, const LstmCellParams& params) {
    const std::size_t H = params.hidden_dim;
    if (x_projected.size() != 4 * H || h_prev.size() != H || c_prev.size() != H) {
        throw DimensionError("lstm step: projected input " + ad::shape_string(x_projected.shape()) + ", h " +
                             ad::shape_string(h_prev.shape()) + ", c " + ad::shape_string(c_prev.shape()) +
                             " for hidden size " + std::to_string(H));
    }
    ad::Tensor gates = ad::add(tape, ad::add(tape, x_projected, ad::matmul(tape, h_prev, params.w_hidden)), params.bias);
    ad::Tensor i = ad::sigmoid(tape, ad::slice(tape, gates, 1, 0, H));
    ad::Tensor f = ad::sigmoid(tape, ad::slice(tape, gates, 1, H, H));
    ad::Tensor g = ad::tanh(tape, ad::slice(tape, gates, 1, 2 * H, H));
    ad::Tensor o = ad::sigmoid(tape, ad::slice(tape, gates, 1, 3 * H, H));
    ad::Tensor c = ad::add(tape, ad::mul(tape, f, c_prev), ad::mul(tape, i, g));
    ad::Tensor h = ad::mul(tape, o, ad::tanh(tape, c));
    return {h, c};
}

LstmState lstm_cell_step(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& h_prev, const ad::Tensor& c_prev,
                         const LstmCellParams& params) {
    if (x.rank() != 2 || x.rows() != 1 || x.cols() != params.input_dim) {
        throw DimensionError("lstm step: input " + ad::shape_string(x.shape()) + " for input size " +
                             std::to_string(params.input_dim));
    }
    return lstm_cell_step_projected(tape, ad::matmul(tape, x, params.w_input), h_prev, c_prev, params);
}

EncoderParams EncoderParams::init(std::size_t input_dim, std::size_t hidden_dim, std::size_t layers, Rng& rng) {
    if (layers == 0 || hidden_dim == 0) throw ConfigError("encoder: layers and hidden size must be positive");
    EncoderParams p;
    p.hidden_dim = hidden_dim;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input_dim : 2 * hidden_dim;
        p.forward.push_back(LstmCellParams::init(in, hidden_dim, rng));
        p.backward.push_back(LstmCellParams::init(in, hidden_dim, rng));
    }
    return p;
}

void EncoderParams::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    for (std::size_t l = 0; l < layers(); ++l) {
        forward[l].collect(out, prefix + ".l" + std::to_string(l) + ".fwd");
        backward[l].collect(out, prefix + ".l" + std::to_string(l) + ".bwd");
    }
}

namespace {

// Runs one direction over all positions; returns per-position states in
// position order plus the state after the last processed position.
struct DirectionRun {
    std::vector<ad::Tensor> h;
    LstmState last;
};

DirectionRun run_direction(ad::Tape& tape, const ad::Tensor& input, const LstmCellParams& cell, bool reverse) {
    const std::size_t n = input.rows();
    const ad::Tensor projected = ad::matmul(tape, input, cell.w_input);
    LstmState state{ad::Tensor::zeros({1, cell.hidden_dim}), ad::Tensor::zeros({1, cell.hidden_dim})};
    DirectionRun run;
    run.h.resize(n);
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t t = reverse ? n - 1 - step : step;
        state = lstm_cell_step_projected(tape, ad::row(tape, projected, t), state.h, state.c, cell);
        run.h[t] = state.h;
    }
    run.last = state;
    return run;
}

}  // namespace

EncoderOutput encode(ad::Tape& tape, const ad::Tensor& features, const EncoderParams& params, double dropout_p,
                     bool training, Rng& rng) {
    if (features.rank() != 2 || features.rows() == 0) {
        throw ContractError("encode: need at least one position, got " + ad::shape_string(features.shape()));
    }
    if (features.cols() != params.forward.at(0).input_dim) {
        throw DimensionError("encode: features " + ad::shape_string(features.shape()) + " for input size " +
                             std::to_string(params.forward[0].input_dim));
    }
    EncoderOutput out;
    ad::Tensor input = features;
    for (std::size_t l = 0; l < params.layers(); ++l) {
        if (l > 0) input = ad::dropout(tape, input, dropout_p, training, rng);
        DirectionRun fwd = run_direction(tape, input, params.forward[l], false);
        DirectionRun bwd = run_direction(tape, input, params.backward[l], true);
        ad::Tensor fwd_rows = ad::concat(tape, fwd.h, 0);
        ad::Tensor bwd_rows = ad::concat(tape, bwd.h, 0);
        input = ad::concat(tape, {fwd_rows, bwd_rows}, 1);
        if (l + 1 == params.layers()) {
            out.hbar = input;
            out.final_h = ad::concat(tape, {fwd.last.h, bwd.last.h}, 1);
            out.final_c = ad::concat(tape, {fwd.last.c, bwd.last.c}, 1);
        }
    }
    return out;
}

}  // namespace lvc
