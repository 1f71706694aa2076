#pragma once

#include <string>
#include <vector>

#include "lvc/rng.hpp"
#include "lvc/tensor.hpp"

namespace lvc {

// Standard LSTM cell (no peepholes). Gate blocks along the 4H axis are
// ordered input, forget, candidate, output.
struct LstmCellParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    ad::Tensor w_input;   // input_dim x 4H
    ad::Tensor w_hidden;  // H x 4H
    ad::Tensor bias;      // 1 x 4H

    // Weights uniform(-1/sqrt(H), 1/sqrt(H)); forget bias 1, other biases 0.
    static LstmCellParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
    // Zero weights with the same bias initialisation.
    static LstmCellParams zeros(std::size_t input_dim, std::size_t hidden_dim);

    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

struct LstmState {
    ad::Tensor h;  // 1 x H
    ad::Tensor c;  // 1 x H
};

// i, f, o = sigmoid gates; g = tanh candidate; c = f*c_prev + i*g; h = o*tanh(c).
LstmState lstm_cell_step(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& h_prev, const ad::Tensor& c_prev,
                         const LstmCellParams& params);

// Same step with x W_input precomputed (1 x 4H).
LstmState lstm_cell_step_projected(ad::Tape& tape, const ad::Tensor& x_projected, const ad::Tensor& h_prev,
                                   const ad::Tensor& c_prev, const LstmCellParams& params);

// Multi-layer bidirectional LSTM. Layer 0 reads the word features, deeper
// layers read the previous layer's [forward; backward] outputs.
struct EncoderParams {
    std::size_t hidden_dim = 0;
    std::vector<LstmCellParams> forward;   // one per layer
    std::vector<LstmCellParams> backward;  // one per layer

    static EncoderParams init(std::size_t input_dim, std::size_t hidden_dim, std::size_t layers, Rng& rng);
    std::size_t layers() const { return forward.size(); }
    std::size_t output_dim() const { return 2 * hidden_dim; }

    void collect(std::vector<ad::NamedTensor>& out, const std::string& prefix) const;
};

struct EncoderOutput {
    ad::Tensor hbar;     // n x 2H, top layer per position
    ad::Tensor final_h;  // 1 x 2H: [forward at t = n; backward at t = 1]
    ad::Tensor final_c;  // 1 x 2H, same rule
};

// Both directions start from zero states. Dropout applies between layers,
// never to the top output.
EncoderOutput encode(ad::Tape& tape, const ad::Tensor& features, const EncoderParams& params, double dropout_p,
                     bool training, Rng& rng);

}  // namespace lvc
