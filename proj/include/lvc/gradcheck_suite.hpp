#pragma once

// Finite-difference checks over every tensor operator, the network blocks
// and whole-model losses at toy sizes.

#include <cstdint>
#include <string>
#include <vector>

#include "lvc/model.hpp"

namespace lvc {

struct GradCase {
    std::string name;
    ad::GradCheckReport report;
};

// One case per operator plus the LSTM cell, attention and encoder.
std::vector<GradCase> operator_gradient_cases(std::uint64_t seed);

// Full training loss of `kind` on a 2-token instance with k = 2, H = 4 and
// dropout off.
GradCase model_gradient_case(ModelKind kind, std::uint64_t seed);

}  // namespace lvc
