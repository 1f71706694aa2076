#include "lvc/affine.hpp"

#include <cmath>

namespace lvc {

Affine Affine::init(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    Affine a = zeros(in_dim, out_dim);
    if (in_dim > 0) {
        const double r = 1.0 / std::sqrt(static_cast<double>(in_dim));
        a.weight = ad::Tensor::uniform({in_dim, out_dim}, -r, r, rng, true);
    }
    return a;
}

Affine Affine::zeros(std::size_t in_dim, std::size_t out_dim) {
    return {ad::Tensor::zeros({in_dim, out_dim}, true), ad::Tensor::zeros({1, out_dim}, true)};
}

ad::Tensor Affine::apply(ad::Tape& tape, const ad::Tensor& x) const {
    return ad::add(tape, ad::matmul(tape, x, weight), bias);
}

void Affine::collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

}  // namespace lvc
