#pragma once

// Reverse-mode automatic differentiation over dense 64-bit tensors.
//
// A Tensor is a shared handle to a value buffer and a gradient buffer of the
// same length. Operations take the Tape they record onto as their first
// argument; a tape belongs to one thread. Gradients accumulate (+=) into
// leaves until zero_grad().
//
// Only rank-1 and rank-2 tensors are used by the models. Elementwise binary
// operations accept identical shapes or a row vector ({n} or {1, n}) on the
// right broadcast over the rows of an {m, n} left operand. Nothing else
// broadcasts.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lvc/rng.hpp"

namespace lvc::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

class Tape;

namespace detail {
struct Storage {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    const Tape* tape = nullptr;  // tape that produced this tensor, if any
    std::int64_t node = -1;      // index of the producing node on that tape
};
}  // namespace detail

class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    // Uniform(lo, hi) entries drawn in storage order.
    static Tensor uniform(Shape shape, double lo, double hi, Rng& rng, bool requires_grad = false);

    bool defined() const noexcept { return static_cast<bool>(s_); }
    const Shape& shape() const { return s_->shape; }
    std::size_t rank() const { return s_->shape.size(); }
    std::size_t size() const { return s_->value.size(); }
    // Rows/cols treat a rank-1 tensor as a single row.
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<double> data() { return s_->value; }
    std::span<const double> data() const { return s_->value; }
    std::span<double> grad() { return s_->grad; }
    std::span<const double> grad() const { return s_->grad; }

    double item() const;
    double at(std::size_t i) const { return s_->value[i]; }
    double at(std::size_t r, std::size_t c) const { return s_->value[r * cols() + c]; }

    bool requires_grad() const { return s_->requires_grad; }
    void set_requires_grad(bool on) { s_->requires_grad = on; }
    void zero_grad();

    // Deep copy of values only; the copy is a fresh leaf.
    Tensor detach() const;
    void copy_from(const Tensor& other);

    bool is_same(const Tensor& other) const noexcept { return s_ == other.s_; }
    std::int64_t node() const { return s_->node; }

    const std::shared_ptr<detail::Storage>& storage() const { return s_; }

private:
    explicit Tensor(std::shared_ptr<detail::Storage> s) : s_(std::move(s)) {}
    friend class Tape;

    std::shared_ptr<detail::Storage> s_;
};

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

// Ordered record of operations. Nodes are appended in execution order, so
// every node's inputs precede it; backward() walks them in reverse.
class Tape {
public:
    Tape() = default;
    // A non-recording tape evaluates operations without keeping a graph.
    explicit Tape(bool recording) : recording_(recording) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const noexcept { return recording_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    struct Node {
        std::vector<std::int64_t> input_nodes;  // -1 for leaves
        std::function<void()> backward;
    };
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

    // Creates an operation result. The result requires grad when the tape is
    // recording and any input requires grad; only then is `backward` kept.
    Tensor make_output(Shape shape, std::initializer_list<const Tensor*> inputs);
    Tensor make_output(Shape shape, std::span<const Tensor> inputs);
    void record(const Tensor& output, std::span<const Tensor> inputs, std::function<void()> backward);

    // Propagates d(loss)/d(x) into the grad buffer of every tensor that
    // requires grad. Intermediate gradients are reset on each call; leaf
    // gradients accumulate.
    void backward(const Tensor& loss);

private:
    bool recording_ = true;
    std::vector<Node> nodes_;
    std::vector<std::shared_ptr<detail::Storage>> outputs_;
};

// ---- operators -------------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor transpose(Tape& tape, const Tensor& x);

enum class Elementwise { add, sub, mul, sigmoid, tanh };
Tensor elementwise(Tape& tape, Elementwise op, const Tensor& a, const Tensor& b = {});
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sigmoid(Tape& tape, const Tensor& x);
Tensor tanh(Tape& tape, const Tensor& x);
Tensor scale(Tape& tape, const Tensor& x, double factor);

// axis must be the last axis or axis 0 of a rank-2 tensor.
Tensor softmax(Tape& tape, const Tensor& x, std::size_t axis);

// -log softmax(logits)[target] for a two-element logit vector.
Tensor cross_entropy_2class(Tape& tape, const Tensor& logits, int target);
// Same over any number of classes; logits is {C} or {1, C}.
Tensor cross_entropy(Tape& tape, const Tensor& logits, std::size_t target);
// -[t log sigmoid(z) + (1 - t) log(1 - sigmoid(z))] for a single logit.
Tensor binary_cross_entropy_with_logit(Tape& tape, const Tensor& logit, int target);

Tensor concat(Tape& tape, std::span<const Tensor> parts, std::size_t axis);
Tensor concat(Tape& tape, std::initializer_list<Tensor> parts, std::size_t axis);
Tensor slice(Tape& tape, const Tensor& x, std::size_t axis, std::size_t start, std::size_t length);
Tensor row(Tape& tape, const Tensor& x, std::size_t r);
// Rows of `table` selected by `ids`, as an {ids.size(), cols} matrix.
Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::size_t> ids);

// Elementwise sum of equally shaped tensors.
Tensor add_n(Tape& tape, std::span<const Tensor> terms);
Tensor sum(Tape& tape, const Tensor& x);
Tensor mean(Tape& tape, const Tensor& x);

// Inverted dropout: kept entries are scaled by 1 / (1 - p). Identity when
// not training or p == 0.
Tensor dropout(Tape& tape, const Tensor& x, double p, bool training, Rng& rng);

// ---- optimizer -------------------------------------------------------------

struct AdamState {
    AdamState() = default;
    explicit AdamState(double lr, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8);

    std::size_t step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 5e-4;
};

// One bias-corrected Adam update over `params` using their current grads.
void adam_step(std::span<Tensor> params, AdamState& state);

// ---- gradient checking -----------------------------------------------------

struct GradCheckEntry {
    std::string name;
    std::size_t checked = 0;
    double max_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed() const { return max_error < tolerance; }
};

using LossBuilder = std::function<Tensor(Tape&)>;

// Error between analytic and numeric derivatives a and n, scaled so that
// `< tol` means relative error < tol or absolute error < abs_floor.
double gradient_error(double analytic, double numeric, double tol, double abs_floor);

// Compares backward() against central differences for every entry of every
// tensor in `params`. The builder must be deterministic; two forward passes
// that differ raise ContractError.
GradCheckReport grad_check(const LossBuilder& build, std::span<const NamedTensor> params, double h = 1e-5,
                           double tol = 1e-4, double abs_floor = 1e-6);

}  // namespace lvc::ad
