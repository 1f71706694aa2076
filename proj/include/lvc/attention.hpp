#pragma once

#include <string>
#include <vector>

#include "lvc/rng.hpp"
#include "lvc/tensor.hpp"

namespace lvc {

// Global attention with the bilinear ("general") score. Both matrices use
// the row-vector convention: score_i = (h W_a) . hbar_i, and the combined
// state is tanh([ctx; h] W_c) with W_c stored as 2*width x width.
struct AttentionParams {
    ad::Tensor score;    // width x width
    ad::Tensor combine;  // 2*width x width

    static AttentionParams init(std::size_t width, Rng& rng);
    static AttentionParams zeros(std::size_t width);
    std::size_t width() const { return score.rows(); }

    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

struct AttentionResult {
    ad::Tensor alpha;    // 1 x n, sums to 1
    ad::Tensor context;  // 1 x width, sum_i alpha_i hbar_i
    ad::Tensor h_tilde;  // 1 x width
};

// h_d is 1 x width, hbar is n x width. No masking: every row participates.
AttentionResult attend(ad::Tape& tape, const ad::Tensor& h_d, const ad::Tensor& hbar, const AttentionParams& params);

}  // namespace lvc
