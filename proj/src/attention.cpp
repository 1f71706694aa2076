#include "lvc/attention.hpp"

#include <cmath>

#include "lvc/errors.hpp"

namespace lvc {

AttentionParams AttentionParams::init(std::size_t width, Rng& rng) {
    const double r_score = 1.0 / std::sqrt(static_cast<double>(width));
    const double r_combine = 1.0 / std::sqrt(static_cast<double>(2 * width));
    AttentionParams p;
    p.score = ad::Tensor::uniform({width, width}, -r_score, r_score, rng, true);
    p.combine = ad::Tensor::uniform({2 * width, width}, -r_combine, r_combine, rng, true);
    return p;
}

AttentionParams AttentionParams::zeros(std::size_t width) {
    return {ad::Tensor::zeros({width, width}, true), ad::Tensor::zeros({2 * width, width}, true)};
}

void AttentionParams::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    out.push_back({prefix + ".score", score});
    out.push_back({prefix + ".combine", combine});
}

AttentionResult attend(ad::Tape& tape, const ad::Tensor& h_d, const ad::Tensor& hbar, const AttentionParams& params) {
    if (hbar.rank() != 2 || hbar.rows() == 0) {
        throw ContractError("attend: need at least one encoder state, got " + ad::shape_string(hbar.shape()));
    }
    const std::size_t w = params.width();
    if (hbar.cols() != w || h_d.size() != w) {
        throw DimensionError("attend: decoder state " + ad::shape_string(h_d.shape()) + ", encoder states " +
                             ad::shape_string(hbar.shape()) + " for width " + std::to_string(w));
    }
    const ad::Tensor query = ad::matmul(tape, h_d, params.score);                           // 1 x w
    const ad::Tensor scores = ad::matmul(tape, hbar, ad::transpose(tape, query));            // n x 1
    const ad::Tensor alpha = ad::transpose(tape, ad::softmax(tape, scores, 0));             // 1 x n
    const ad::Tensor context = ad::matmul(tape, alpha, hbar);                               // 1 x w
    const ad::Tensor joined = ad::concat(tape, {context, h_d}, 1);                          // 1 x 2w
    const ad::Tensor h_tilde = ad::tanh(tape, ad::matmul(tape, joined, params.combine));   // 1 x w
    return {alpha, context, h_tilde};
}

}  // namespace lvc
