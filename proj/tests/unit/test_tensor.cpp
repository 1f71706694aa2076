#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lvc/errors.hpp"
#include "lvc/gradcheck_suite.hpp"
#include "lvc/tensor.hpp"

using namespace lvc;
using ad::Tape;
using ad::Tensor;

namespace {

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST(Tensor, CreationZeroesGrad) {
    Tensor t = Tensor::full({2, 3}, 1.5, true);
    EXPECT_EQ(t.size(), 6u);
    EXPECT_EQ(t.grad().size(), 6u);
    for (double g : t.grad()) EXPECT_EQ(g, 0.0);
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t.cols(), 3u);
    EXPECT_THROW(Tensor::from({2, 2}, {1, 2, 3}), DimensionError);
}

TEST(Tensor, MatmulExamples) {
    Tape tape;
    const Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
    const Tensor m = Tensor::from({2, 2}, {1, 2, 3, 4});
    EXPECT_EQ(values(ad::matmul(tape, eye, m)), (std::vector<double>{1, 2, 3, 4}));
    const Tensor r = ad::matmul(tape, Tensor::from({1, 2}, {1, 2}), Tensor::from({2, 1}, {3, 4}));
    EXPECT_EQ(r.shape(), (ad::Shape{1, 1}));
    EXPECT_EQ(r.item(), 11.0);
}

TEST(Tensor, MatmulShapeErrorNamesBothShapes) {
    Tape tape;
    try {
        ad::matmul(tape, Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("[2 x 3]"), std::string::npos) << msg;
    }
}

TEST(Tensor, ElementwiseExamples) {
    Tape tape;
    EXPECT_EQ(ad::sigmoid(tape, Tensor::scalar(0.0)).item(), 0.5);
    EXPECT_EQ(ad::tanh(tape, Tensor::scalar(0.0)).item(), 0.0);
    EXPECT_EQ(values(ad::add(tape, Tensor::from({2}, {1, 2}), Tensor::from({2}, {3, 4}))),
              (std::vector<double>{4, 6}));
}

TEST(Tensor, RowBroadcastOnly) {
    Tape tape;
    const Tensor m = Tensor::from({2, 2}, {1, 2, 3, 4});
    EXPECT_EQ(values(ad::add(tape, m, Tensor::from({1, 2}, {10, 20}))), (std::vector<double>{11, 22, 13, 24}));
    EXPECT_THROW(ad::add(tape, m, Tensor::from({2, 1}, {1, 2})), DimensionError);
    EXPECT_THROW(ad::mul(tape, Tensor::zeros({3}), Tensor::zeros({2})), DimensionError);
}

TEST(Tensor, SoftmaxExamples) {
    Tape tape;
    EXPECT_EQ(values(ad::softmax(tape, Tensor::from({2}, {0, 0}), 0)), (std::vector<double>{0.5, 0.5}));
    const auto big = values(ad::softmax(tape, Tensor::from({2}, {1000, 0}), 0));
    EXPECT_TRUE(std::isfinite(big[0]) && std::isfinite(big[1]));
    EXPECT_NEAR(big[0], 1.0, 1e-15);
    EXPECT_NEAR(big[1], 0.0, 1e-15);
    // 40-digit reference values.
    const auto p = values(ad::softmax(tape, Tensor::from({3}, {1, 2, 3}), 0));
    EXPECT_NEAR(p[0], 0.0900305731703804579980221, 1e-12);
    EXPECT_NEAR(p[1], 0.2447284710547976524729596, 1e-12);
    EXPECT_NEAR(p[2], 0.6652409557748218895290183, 1e-12);
}

TEST(Tensor, SoftmaxRowsSumToOne) {
    Rng rng(3);
    Tape tape;
    const Tensor x = Tensor::uniform({5, 7}, -4, 4, rng);
    for (std::size_t axis : {0u, 1u}) {
        const Tensor s = ad::softmax(tape, x, axis);
        const std::size_t outer = axis == 1 ? 5 : 7, inner = axis == 1 ? 7 : 5;
        for (std::size_t a = 0; a < outer; ++a) {
            double total = 0.0;
            for (std::size_t b = 0; b < inner; ++b) {
                const double v = axis == 1 ? s.at(a, b) : s.at(b, a);
                EXPECT_GT(v, 0.0);
                EXPECT_LT(v, 1.0);
                total += v;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(Tensor, SoftmaxRejectsNonFinite) {
    Tape tape;
    EXPECT_THROW(ad::softmax(tape, Tensor::from({2}, {NAN, 0}), 0), NumericError);
}

TEST(Tensor, CrossEntropyExamples) {
    Tape tape;
    EXPECT_NEAR(ad::cross_entropy_2class(tape, Tensor::from({2}, {0, 0}), 1).item(), std::log(2.0), 1e-15);
    EXPECT_NEAR(ad::cross_entropy_2class(tape, Tensor::from({2}, {10, -10}), 0).item(), 2.061153620314380703e-9,
                1e-21);
    EXPECT_THROW(ad::cross_entropy_2class(tape, Tensor::from({2}, {0, 0}), 2), DomainError);
    EXPECT_THROW(ad::cross_entropy_2class(tape, Tensor::from({2}, {0, 0}), -1), DomainError);
    EXPECT_THROW(ad::cross_entropy_2class(tape, Tensor::from({3}, {0, 0, 0}), 0), DimensionError);
}

TEST(Tensor, ConcatExamples) {
    Tape tape;
    EXPECT_EQ(values(ad::concat(tape, {Tensor::from({2}, {1, 2}), Tensor::from({1}, {3})}, 0)),
              (std::vector<double>{1, 2, 3}));
    const Tensor one = Tensor::from({2}, {5, 6});
    const Tensor copy = ad::concat(tape, {one}, 0);
    EXPECT_FALSE(copy.is_same(one));
    EXPECT_EQ(values(copy), values(one));
    EXPECT_THROW(ad::concat(tape, {Tensor::zeros({2, 2}), Tensor::zeros({3, 3})}, 1), DimensionError);
}

TEST(Tensor, ConcatGradientIsOnes) {
    Tape tape;
    Tensor a = Tensor::from({1, 2}, {1, 2}, true);
    Tensor b = Tensor::from({1, 3}, {3, 4, 5}, true);
    tape.backward(ad::sum(tape, ad::concat(tape, {a, b}, 1)));
    for (double g : a.grad()) EXPECT_EQ(g, 1.0);
    for (double g : b.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Tensor, DropoutExamples) {
    Rng rng(11);
    Tape tape;
    const Tensor x = Tensor::uniform({4, 4}, -1, 1, rng);
    EXPECT_EQ(values(ad::dropout(tape, x, 0.0, true, rng)), values(x));
    EXPECT_EQ(values(ad::dropout(tape, x, 0.5, false, rng)), values(x));
    EXPECT_THROW(ad::dropout(tape, x, 1.0, true, rng), DomainError);
    EXPECT_THROW(ad::dropout(tape, x, -0.1, true, rng), DomainError);

    const Tensor ones = Tensor::full({1000000}, 1.0);
    const Tensor d = ad::dropout(tape, ones, 0.2, true, rng);
    double mean = 0.0;
    for (double v : d.data()) {
        EXPECT_TRUE(v == 0.0 || v == 1.25);
        mean += v;
    }
    mean /= 1e6;
    EXPECT_NEAR(mean, 1.0, 0.01);
}

TEST(Tensor, BackwardExamples) {
    {
        Tape tape;
        Tensor x = Tensor::scalar(3.0, true);
        tape.backward(ad::mul(tape, x, x));
        EXPECT_EQ(x.grad()[0], 6.0);
    }
    {
        Tape tape;
        Tensor x = Tensor::scalar(0.0, true);
        tape.backward(ad::sigmoid(tape, x));
        EXPECT_EQ(x.grad()[0], 0.25);
    }
}

TEST(Tensor, BackwardRequiresScalar) {
    Tape tape;
    Tensor x = Tensor::from({2}, {1, 2}, true);
    EXPECT_THROW(tape.backward(ad::scale(tape, x, 2.0)), ContractError);
}

TEST(Tensor, BackwardAccumulates) {
    Rng rng(5);
    Tensor w = Tensor::uniform({3, 2}, -1, 1, rng, true);
    const Tensor x = Tensor::uniform({1, 3}, -1, 1, rng);
    auto run = [&] {
        Tape tape;
        tape.backward(ad::sum(tape, ad::tanh(tape, ad::matmul(tape, x, w))));
    };
    run();
    const std::vector<double> once(w.grad().begin(), w.grad().end());
    run();
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(w.grad()[i], 2.0 * once[i]);
    w.zero_grad();
    for (double g : w.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Tensor, TapeIsTopologicallyOrdered) {
    Rng rng(9);
    Tensor w = Tensor::uniform({3, 3}, -1, 1, rng, true);
    Tape tape;
    Tensor h = Tensor::uniform({1, 3}, -1, 1, rng);
    for (int i = 0; i < 4; ++i) h = ad::tanh(tape, ad::matmul(tape, h, w));
    ad::sum(tape, h);
    const auto& nodes = tape.nodes();
    ASSERT_FALSE(nodes.empty());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (auto in : nodes[i].input_nodes) EXPECT_LT(in, static_cast<std::int64_t>(i));
    }
}

TEST(Tensor, ReplayIsBitIdentical) {
    auto run = [] {
        Rng rng(21);
        Tensor w = Tensor::uniform({4, 4}, -1, 1, rng, true);
        const Tensor x = Tensor::uniform({2, 4}, -1, 1, rng);
        Tape tape;
        const Tensor loss = ad::sum(tape, ad::dropout(tape, ad::tanh(tape, ad::matmul(tape, x, w)), 0.3, true, rng));
        tape.backward(loss);
        std::vector<double> out{loss.item()};
        out.insert(out.end(), w.grad().begin(), w.grad().end());
        return out;
    };
    EXPECT_EQ(run(), run());
}

TEST(Tensor, NonRecordingTapeKeepsNoGraph) {
    Tensor w = Tensor::full({2, 2}, 0.5, true);
    Tape tape(false);
    const Tensor y = ad::matmul(tape, Tensor::full({1, 2}, 1.0), w);
    EXPECT_EQ(tape.size(), 0u);
    EXPECT_FALSE(y.requires_grad());
}

TEST(Adam, ZeroGradientLeavesParameter) {
    Tensor p = Tensor::from({3}, {1, -2, 3}, true);
    std::vector<Tensor> ps{p};
    ad::AdamState s(0.1);
    for (int i = 0; i < 5; ++i) ad::adam_step(ps, s);
    EXPECT_EQ(values(p), (std::vector<double>{1, -2, 3}));
    EXPECT_EQ(s.step_count, 5u);
}

TEST(Adam, FirstStepsWithUnitGradient) {
    Tensor p = Tensor::scalar(0.0, true);
    std::vector<Tensor> ps{p};
    ad::AdamState s(5e-4);
    p.grad()[0] = 1.0;
    ad::adam_step(ps, s);
    EXPECT_NEAR(p.item(), -0.0004999999950000001, 1e-15);
    ad::adam_step(ps, s);
    EXPECT_NEAR(p.item(), -0.0009999999899999966, 1e-15);
}

TEST(Adam, QuadraticHundredSteps) {
    Tensor x = Tensor::scalar(5.0, true);
    std::vector<Tensor> ps{x};
    ad::AdamState s(0.1);
    for (int i = 0; i < 100; ++i) {
        x.zero_grad();
        Tape tape;
        tape.backward(ad::mul(tape, x, x));
        ad::adam_step(ps, s);
    }
    EXPECT_LT(std::abs(x.item()), 1.0);
    // Reference recurrence evaluated independently.
    EXPECT_NEAR(x.item(), -0.03900403122391936, 1e-12);
}

TEST(Adam, RejectsBadHyperparameters) {
    EXPECT_THROW(ad::AdamState(0.0), DomainError);
    EXPECT_THROW(ad::AdamState(1e-3, 1.0), DomainError);
    EXPECT_THROW(ad::AdamState(1e-3, 0.9, 0.999, 0.0), DomainError);
}

TEST(GradCheck, MatmulSum) {
    Rng rng(2);
    Tensor a = Tensor::uniform({3, 4}, -1, 1, rng, true);
    Tensor b = Tensor::uniform({4, 2}, -1, 1, rng, true);
    const std::vector<ad::NamedTensor> params{{"a", a}, {"b", b}};
    const auto report = ad::grad_check([&](Tape& t) { return ad::sum(t, ad::matmul(t, a, b)); }, params, 1e-5, 1e-6);
    EXPECT_TRUE(report.passed()) << report.max_error;
}

TEST(GradCheck, CrossEntropy) {
    Rng rng(4);
    Tensor z = Tensor::uniform({2}, -2, 2, rng, true);
    const std::vector<ad::NamedTensor> params{{"z", z}};
    const auto report =
        ad::grad_check([&](Tape& t) { return ad::cross_entropy_2class(t, z, 1); }, params, 1e-5, 1e-6);
    EXPECT_TRUE(report.passed()) << report.max_error;
}

TEST(GradCheck, DetectsWrongBackward) {
    Tensor x = Tensor::from({2}, {0.3, -0.7}, true);
    const std::vector<ad::NamedTensor> params{{"x", x}};
    // y = 2x with a backward rule that forgets the factor.
    auto broken = [&](Tape& t) {
        Tensor y = t.make_output({2}, {&x});
        for (std::size_t i = 0; i < 2; ++i) y.data()[i] = 2.0 * x.data()[i];
        if (y.requires_grad()) {
            Tensor xin = x, yout = y;
            const Tensor ins[] = {x};
            t.record(y, ins, [xin, yout]() mutable {
                for (std::size_t i = 0; i < 2; ++i) xin.grad()[i] += yout.grad()[i];
            });
        }
        return ad::sum(t, y);
    };
    EXPECT_FALSE(ad::grad_check(broken, params).passed());
}

TEST(GradCheck, NonDeterministicBuilderIsContractError) {
    // Distinct powers of two, so every dropout mask gives a different sum.
    std::vector<double> v(16);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::ldexp(1.0, -static_cast<int>(i));
    Tensor x = Tensor::from({1, 16}, v, true);
    const std::vector<ad::NamedTensor> params{{"x", x}};
    Rng rng(1);
    auto noisy = [&](Tape& t) { return ad::sum(t, ad::dropout(t, x, 0.5, true, rng)); };
    EXPECT_THROW(ad::grad_check(noisy, params), ContractError);
}

TEST(GradCheck, ErrorMetricFloor) {
    EXPECT_LT(ad::gradient_error(1e-9, 2e-9, 1e-4, 1e-6), 1e-4);
    EXPECT_GT(ad::gradient_error(1.0, 1.001, 1e-4, 1e-6), 1e-4);
    EXPECT_LT(ad::gradient_error(1.0, 1.00001, 1e-4, 1e-6), 1e-4);
}

TEST(GradCheck, OperatorSuitePasses) {
    const auto cases = operator_gradient_cases(1);
    EXPECT_GE(cases.size(), 20u);
    for (const auto& c : cases) {
        EXPECT_TRUE(c.report.passed()) << c.name << " max_error " << c.report.max_error;
        EXPECT_EQ(c.report.tolerance, 1e-4);
    }
}

TEST(GradCheck, EveryModelLossPasses) {
    for (auto kind : {ModelKind::seq2emo, ModelKind::binary_br2, ModelKind::binary_br_tau, ModelKind::sgm}) {
        const auto c = model_gradient_case(kind, 3);
        EXPECT_TRUE(c.report.passed()) << c.name << " max_error " << c.report.max_error;
    }
}
