#pragma once

#include <string>
#include <vector>

#include "lvc/rng.hpp"
#include "lvc/tensor.hpp"

namespace lvc {

// y = x W + b with x a row vector. Weight is in_dim x out_dim.
struct Affine {
    ad::Tensor weight;
    ad::Tensor bias;  // 1 x out_dim

    // Weights uniform(-1/sqrt(in), 1/sqrt(in)) (or zero when in == 0); bias 0.
    static Affine init(std::size_t in_dim, std::size_t out_dim, Rng& rng);
    static Affine zeros(std::size_t in_dim, std::size_t out_dim);

    std::size_t in_dim() const { return weight.rows(); }
    std::size_t out_dim() const { return weight.cols(); }

    ad::Tensor apply(ad::Tape& tape, const ad::Tensor& x) const;
    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

}  // namespace lvc
