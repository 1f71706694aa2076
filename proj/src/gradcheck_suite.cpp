#include "lvc/gradcheck_suite.hpp"

#include <functional>

#include "lvc/attention.hpp"
#include "lvc/encoder.hpp"

namespace lvc {

namespace {

using ad::Tape;
using ad::Tensor;

Tensor param(ad::Shape shape, Rng& rng) { return Tensor::uniform(std::move(shape), -1.0, 1.0, rng, true); }

// Reduces an output to a scalar with fixed random weights so every output
// entry gets a distinct upstream gradient.
Tensor weighted_sum(Tape& tape, const Tensor& out, std::uint64_t seed) {
    Rng rng(seed);
    const Tensor w = Tensor::uniform(out.shape(), -1.0, 1.0, rng);
    return ad::sum(tape, ad::mul(tape, out, w));
}

GradCase check(const std::string& name, std::vector<ad::NamedTensor> params,
               const std::function<Tensor(Tape&)>& forward, std::uint64_t seed) {
    auto loss = [&](Tape& tape) {
        const Tensor out = forward(tape);
        return out.shape().empty() ? out : weighted_sum(tape, out, seed);
    };
    return {name, ad::grad_check(loss, params)};
}

}  // namespace

std::vector<GradCase> operator_gradient_cases(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<GradCase> out;
    const Tensor a = param({3, 4}, rng);
    const Tensor b = param({4, 2}, rng);
    const Tensor c = param({3, 4}, rng);
    const Tensor row = param({1, 4}, rng);
    const Tensor v5 = param({1, 5}, rng);
    const Tensor two = param({1, 2}, rng);
    const Tensor one = param({1, 1}, rng);
    const Tensor table = param({5, 3}, rng);

    out.push_back(check("matmul", {{"a", a}, {"b", b}}, [&](Tape& t) { return ad::matmul(t, a, b); }, seed + 1));
    out.push_back(check("transpose", {{"a", a}}, [&](Tape& t) { return ad::transpose(t, a); }, seed + 2));
    out.push_back(check("add", {{"a", a}, {"c", c}}, [&](Tape& t) { return ad::add(t, a, c); }, seed + 3));
    out.push_back(check("add_broadcast", {{"a", a}, {"row", row}}, [&](Tape& t) { return ad::add(t, a, row); }, seed + 4));
    out.push_back(check("sub", {{"a", a}, {"row", row}}, [&](Tape& t) { return ad::sub(t, a, row); }, seed + 5));
    out.push_back(check("mul", {{"a", a}, {"c", c}}, [&](Tape& t) { return ad::mul(t, a, c); }, seed + 6));
    out.push_back(check("mul_broadcast", {{"a", a}, {"row", row}}, [&](Tape& t) { return ad::mul(t, a, row); }, seed + 7));
    out.push_back(check("sigmoid", {{"a", a}}, [&](Tape& t) { return ad::sigmoid(t, a); }, seed + 8));
    out.push_back(check("tanh", {{"a", a}}, [&](Tape& t) { return ad::tanh(t, a); }, seed + 9));
    out.push_back(check("scale", {{"a", a}}, [&](Tape& t) { return ad::scale(t, a, -2.5); }, seed + 10));
    out.push_back(check("softmax_rows", {{"a", a}}, [&](Tape& t) { return ad::softmax(t, a, 1); }, seed + 11));
    out.push_back(check("softmax_cols", {{"a", a}}, [&](Tape& t) { return ad::softmax(t, a, 0); }, seed + 12));
    out.push_back(check("cross_entropy", {{"v5", v5}}, [&](Tape& t) { return ad::cross_entropy(t, v5, 3); }, seed));
    out.push_back(check("cross_entropy_2class", {{"two", two}},
                        [&](Tape& t) { return ad::cross_entropy_2class(t, two, 1); }, seed));
    out.push_back(check("binary_cross_entropy", {{"one", one}},
                        [&](Tape& t) { return ad::binary_cross_entropy_with_logit(t, one, 0); }, seed));
    out.push_back(check("concat_rows", {{"a", a}, {"row", row}},
                        [&](Tape& t) { return ad::concat(t, {a, row}, 0); }, seed + 13));
    out.push_back(check("concat_cols", {{"a", a}, {"c", c}}, [&](Tape& t) { return ad::concat(t, {a, c}, 1); }, seed + 14));
    out.push_back(check("slice", {{"a", a}}, [&](Tape& t) { return ad::slice(t, a, 1, 1, 2); }, seed + 15));
    out.push_back(check("row", {{"a", a}}, [&](Tape& t) { return ad::row(t, a, 2); }, seed + 16));
    out.push_back(check("gather_rows", {{"table", table}},
                        [&](Tape& t) {
                            const std::size_t ids[] = {4, 0, 4, 2};
                            return ad::gather_rows(t, table, ids);
                        },
                        seed + 17));
    out.push_back(check("add_n", {{"a", a}, {"c", c}},
                        [&](Tape& t) {
                            const Tensor terms[] = {a, c, a};
                            return ad::add_n(t, terms);
                        },
                        seed + 18));
    out.push_back(check("sum", {{"a", a}}, [&](Tape& t) { return ad::sum(t, ad::mul(t, a, a)); }, seed));
    out.push_back(check("mean", {{"a", a}}, [&](Tape& t) { return ad::mean(t, ad::mul(t, a, a)); }, seed));
    out.push_back(check("dropout", {{"a", a}},
                        [&](Tape& t) {
                            Rng mask_rng(seed + 19);  // same mask on every pass
                            return ad::dropout(t, a, 0.3, true, mask_rng);
                        },
                        seed + 20));

    {
        const LstmCellParams cell = LstmCellParams::init(3, 4, rng);
        const Tensor x = param({1, 3}, rng), h = param({1, 4}, rng), c0 = param({1, 4}, rng);
        std::vector<ad::NamedTensor> ps{{"x", x}, {"h", h}, {"c", c0}};
        cell.collect(ps, "cell");
        out.push_back(check("lstm_cell", ps,
                            [&](Tape& t) {
                                const LstmState s = lstm_cell_step(t, x, h, c0, cell);
                                return ad::concat(t, {s.h, s.c}, 1);
                            },
                            seed + 21));
    }
    {
        const AttentionParams attn = AttentionParams::init(4, rng);
        const Tensor hd = param({1, 4}, rng), hbar = param({3, 4}, rng);
        std::vector<ad::NamedTensor> ps{{"h_d", hd}, {"hbar", hbar}};
        attn.collect(ps, "attn");
        out.push_back(check("attention", ps, [&](Tape& t) { return attend(t, hd, hbar, attn).h_tilde; }, seed + 22));
    }
    {
        const EncoderParams enc = EncoderParams::init(3, 2, 2, rng);
        const Tensor x = param({3, 3}, rng);
        std::vector<ad::NamedTensor> ps{{"x", x}};
        enc.collect(ps, "enc");
        out.push_back(check("encoder", ps,
                            [&](Tape& t) {
                                Rng unused(0);
                                const EncoderOutput o = encode(t, x, enc, 0.0, false, unused);
                                return ad::concat(t, {o.hbar, o.final_h, o.final_c}, 0);
                            },
                            seed + 23));
    }
    return out;
}

GradCase model_gradient_case(ModelKind kind, std::uint64_t seed) {
    ModelDims dims;
    dims.hidden = 4;
    dims.layers = 2;
    dims.glove_dim = 3;
    dims.aux_dim = 0;
    dims.moji_dim = 2;
    dims.signal_dim = 3;
    dims.moji_proj_dim = 3;
    dims.label_dim = 3;
    dims.dropout = 0.0;
    if (kind != ModelKind::seq2emo) dims.moji_dim = 0;

    Rng rng(seed);
    const Vocabulary vocab = Vocabulary::from_tokens({"<pad>", "<unk>", "alpha", "beta"});
    ModelBundle model = ModelBundle::init(kind, dims, vocab, LabelSpace({"a", "b"}), rng);

    FeatureStore features;
    if (dims.moji_dim > 0) {
        features.instance.add("x", {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
    }
    Instance inst{"x", {2, 3}, BinaryLabelVector(std::vector<std::uint8_t>{1, 0})};
    if (kind == ModelKind::sgm) inst.gold = BinaryLabelVector(std::vector<std::uint8_t>{1, 1});

    const auto params = model.parameters();
    auto loss = [&](Tape& tape) {
        Rng unused(0);
        return training_loss(tape, model, inst, features, unused);
    };
    return {"model_" + to_string(kind), ad::grad_check(loss, params)};
}

}  // namespace lvc
