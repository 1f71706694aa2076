#include "lvc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "lvc/errors.hpp"

namespace lvc::ad {

std::string shape_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << " x ";
        out << shape[i];
    }
    out << ']';
    return out.str();
}

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

// ---- Tensor ----------------------------------------------------------------

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    auto s = std::make_shared<detail::Storage>();
    const std::size_t n = shape_size(shape);
    s->shape = std::move(shape);
    s->value.assign(n, value);
    s->grad.assign(n, 0.0);
    s->requires_grad = requires_grad;
    return Tensor(std::move(s));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    if (shape_size(shape) != values.size()) {
        throw DimensionError("tensor shape " + shape_string(shape) + " does not hold " +
                             std::to_string(values.size()) + " values");
    }
    auto s = std::make_shared<detail::Storage>();
    s->shape = std::move(shape);
    s->grad.assign(values.size(), 0.0);
    s->value = std::move(values);
    s->requires_grad = requires_grad;
    return Tensor(std::move(s));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({}, {value}, requires_grad); }

Tensor Tensor::uniform(Shape shape, double lo, double hi, Rng& rng, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    for (auto& v : t.s_->value) v = lvc::uniform(rng, lo, hi);
    return t;
}

std::size_t Tensor::rows() const {
    const auto& sh = s_->shape;
    return sh.size() == 2 ? sh[0] : 1;
}

std::size_t Tensor::cols() const {
    const auto& sh = s_->shape;
    if (sh.empty()) return 1;
    return sh.back();
}

double Tensor::item() const {
    if (size() != 1) throw ContractError("item() on tensor of shape " + shape_string(shape()));
    return s_->value[0];
}

void Tensor::zero_grad() { std::fill(s_->grad.begin(), s_->grad.end(), 0.0); }

Tensor Tensor::detach() const { return from(s_->shape, s_->value, false); }

void Tensor::copy_from(const Tensor& other) {
    if (other.shape() != shape()) {
        throw DimensionError("copy_from: " + shape_string(other.shape()) + " into " + shape_string(shape()));
    }
    std::copy(other.s_->value.begin(), other.s_->value.end(), s_->value.begin());
}

// ---- Tape ------------------------------------------------------------------

Tensor Tape::make_output(Shape shape, std::initializer_list<const Tensor*> inputs) {
    Tensor out = Tensor::zeros(std::move(shape));
    if (recording_) {
        for (const Tensor* in : inputs) {
            if (in && in->defined() && in->requires_grad()) {
                out.set_requires_grad(true);
                break;
            }
        }
    }
    return out;
}

Tensor Tape::make_output(Shape shape, std::span<const Tensor> inputs) {
    Tensor out = Tensor::zeros(std::move(shape));
    if (recording_) {
        out.set_requires_grad(std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); }));
    }
    return out;
}

void Tape::record(const Tensor& output, std::span<const Tensor> inputs, std::function<void()> backward) {
    if (!output.requires_grad()) return;
    Node node;
    node.input_nodes.reserve(inputs.size());
    for (const auto& in : inputs) node.input_nodes.push_back(in.storage()->tape == this ? in.node() : -1);
    node.backward = std::move(backward);
    output.storage()->tape = this;
    output.storage()->node = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back(std::move(node));
    outputs_.push_back(output.storage());
}

void Tape::backward(const Tensor& loss) {
    if (!loss.defined() || loss.size() != 1) {
        throw ContractError("backward: loss must be a scalar, got shape " +
                            (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
    }
    const auto& s = loss.storage();
    if (s->tape != this || s->node < 0) throw ContractError("backward: loss was not recorded on this tape");
    const auto last = static_cast<std::size_t>(s->node);
    for (std::size_t i = 0; i <= last; ++i) std::fill(outputs_[i]->grad.begin(), outputs_[i]->grad.end(), 0.0);
    s->grad[0] = 1.0;
    for (std::size_t i = last + 1; i-- > 0;) nodes_[i].backward();
}

namespace {

using StoragePtr = std::shared_ptr<detail::Storage>;

void require_finite(std::span<const double> v, const char* op) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite input");
    }
}

// Classifies the right operand of a binary elementwise op.
bool is_row_broadcast(const Tensor& a, const Tensor& b) {
    if (a.shape() == b.shape()) return false;
    if (a.rank() == 2 && b.size() == a.cols() &&
        ((b.rank() == 1) || (b.rank() == 2 && b.rows() == 1))) {
        return true;
    }
    throw DimensionError("elementwise: shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()) +
                         " are not broadcast-compatible");
}

double sigmoid_value(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

// ---- linear algebra --------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
        throw DimensionError("matmul: cannot multiply " + shape_string(a.shape()) + " by " + shape_string(b.shape()));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = tape.make_output({m, n}, {&a, &b});
    {
        const double* A = a.data().data();
        const double* B = b.data().data();
        double* C = out.data().data();
        for (std::size_t i = 0; i < m; ++i) {
            double* crow = C + i * n;
            for (std::size_t p = 0; p < k; ++p) {
                const double av = A[i * k + p];
                if (av == 0.0) continue;
                const double* brow = B + p * n;
                for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    }
    const Tensor ins[] = {a, b};
    tape.record(out, ins, [o = out.storage(), sa = a.storage(), sb = b.storage(), m, k, n] {
        const double* dC = o->grad.data();
        if (sa->requires_grad) {
            double* dA = sa->grad.data();
            const double* B = sb->value.data();
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    const double* brow = B + p * n;
                    const double* crow = dC + i * n;
                    for (std::size_t j = 0; j < n; ++j) acc += crow[j] * brow[j];
                    dA[i * k + p] += acc;
                }
            }
        }
        if (sb->requires_grad) {
            double* dB = sb->grad.data();
            const double* A = sa->value.data();
            for (std::size_t i = 0; i < m; ++i) {
                const double* crow = dC + i * n;
                for (std::size_t p = 0; p < k; ++p) {
                    const double av = A[i * k + p];
                    if (av == 0.0) continue;
                    double* drow = dB + p * n;
                    for (std::size_t j = 0; j < n; ++j) drow[j] += av * crow[j];
                }
            }
        }
    });
    return out;
}

Tensor transpose(Tape& tape, const Tensor& x) {
    if (x.rank() > 2) throw DimensionError("transpose: rank > 2 tensor " + shape_string(x.shape()));
    const std::size_t r = x.rows(), c = x.cols();
    Tensor out = tape.make_output({c, r}, {&x});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out.data()[j * r + i] = x.data()[i * c + j];
    const Tensor ins[] = {x};
    tape.record(out, ins, [o = out.storage(), sx = x.storage(), r, c] {
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) sx->grad[i * c + j] += o->grad[j * r + i];
    });
    return out;
}

// ---- elementwise -----------------------------------------------------------

Tensor elementwise(Tape& tape, Elementwise op, const Tensor& a, const Tensor& b) {
    if (op == Elementwise::sigmoid || op == Elementwise::tanh) {
        Tensor out = tape.make_output(a.shape(), {&a});
        auto y = out.data();
        auto x = a.data();
        if (op == Elementwise::sigmoid) {
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = sigmoid_value(x[i]);
        } else {
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(x[i]);
        }
        const Tensor ins[] = {a};
        tape.record(out, ins, [o = out.storage(), sa = a.storage(), op] {
            const auto& yv = o->value;
            for (std::size_t i = 0; i < yv.size(); ++i) {
                const double d = op == Elementwise::sigmoid ? yv[i] * (1.0 - yv[i]) : 1.0 - yv[i] * yv[i];
                sa->grad[i] += o->grad[i] * d;
            }
        });
        return out;
    }

    if (!b.defined()) throw ContractError("elementwise: binary operator needs two operands");
    const bool bcast = is_row_broadcast(a, b);
    const std::size_t n = b.size();
    Tensor out = tape.make_output(a.shape(), {&a, &b});
    {
        auto y = out.data();
        auto x = a.data();
        auto z = b.data();
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double zv = z[bcast ? i % n : i];
            switch (op) {
                case Elementwise::add: y[i] = x[i] + zv; break;
                case Elementwise::sub: y[i] = x[i] - zv; break;
                default: y[i] = x[i] * zv; break;
            }
        }
    }
    const Tensor ins[] = {a, b};
    tape.record(out, ins, [o = out.storage(), sa = a.storage(), sb = b.storage(), op, bcast, n] {
        const auto& g = o->grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::size_t j = bcast ? i % n : i;
            double ga, gb;
            switch (op) {
                case Elementwise::add: ga = g[i]; gb = g[i]; break;
                case Elementwise::sub: ga = g[i]; gb = -g[i]; break;
                default: ga = g[i] * sb->value[j]; gb = g[i] * sa->value[i]; break;
            }
            if (sa->requires_grad) sa->grad[i] += ga;
            if (sb->requires_grad) sb->grad[j] += gb;
        }
    });
    return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) { return elementwise(tape, Elementwise::add, a, b); }
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) { return elementwise(tape, Elementwise::sub, a, b); }
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) { return elementwise(tape, Elementwise::mul, a, b); }
Tensor sigmoid(Tape& tape, const Tensor& x) { return elementwise(tape, Elementwise::sigmoid, x); }
Tensor tanh(Tape& tape, const Tensor& x) { return elementwise(tape, Elementwise::tanh, x); }

Tensor scale(Tape& tape, const Tensor& x, double factor) {
    Tensor out = tape.make_output(x.shape(), {&x});
    for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = x.data()[i] * factor;
    const Tensor ins[] = {x};
    tape.record(out, ins, [o = out.storage(), sx = x.storage(), factor] {
        for (std::size_t i = 0; i < o->grad.size(); ++i) sx->grad[i] += o->grad[i] * factor;
    });
    return out;
}

// ---- softmax and losses ----------------------------------------------------

Tensor softmax(Tape& tape, const Tensor& x, std::size_t axis) {
    if (x.rank() == 0 || x.rank() > 2 || axis >= x.rank()) {
        throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for " + shape_string(x.shape()));
    }
    if (x.shape()[axis] == 0) throw DimensionError("softmax: empty axis");
    require_finite(x.data(), "softmax");
    // groups of `len` entries spaced `stride` apart
    const bool along_rows = x.rank() == 2 && axis == 0;
    const std::size_t len = x.shape()[axis];
    const std::size_t groups = x.size() / len;
    const std::size_t stride = along_rows ? x.cols() : 1;
    auto index = [=](std::size_t g, std::size_t i) { return along_rows ? g + i * stride : g * len + i; };

    Tensor out = tape.make_output(x.shape(), {&x});
    auto xv = x.data();
    auto y = out.data();
    for (std::size_t g = 0; g < groups; ++g) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < len; ++i) mx = std::max(mx, xv[index(g, i)]);
        double total = 0.0;
        for (std::size_t i = 0; i < len; ++i) total += (y[index(g, i)] = std::exp(xv[index(g, i)] - mx));
        for (std::size_t i = 0; i < len; ++i) y[index(g, i)] /= total;
    }
    const Tensor ins[] = {x};
    tape.record(out, ins, [o = out.storage(), sx = x.storage(), groups, len, index] {
        for (std::size_t g = 0; g < groups; ++g) {
            double dot = 0.0;
            for (std::size_t i = 0; i < len; ++i) dot += o->grad[index(g, i)] * o->value[index(g, i)];
            for (std::size_t i = 0; i < len; ++i) {
                const std::size_t j = index(g, i);
                sx->grad[j] += o->value[j] * (o->grad[j] - dot);
            }
        }
    });
    return out;
}

Tensor cross_entropy(Tape& tape, const Tensor& logits, std::size_t target) {
    if (logits.rank() > 2 || logits.rows() != 1 || logits.size() == 0) {
        throw DimensionError("cross_entropy: logits must be a vector, got " + shape_string(logits.shape()));
    }
    const std::size_t c = logits.size();
    if (target >= c) throw DomainError("cross_entropy: target " + std::to_string(target) + " outside [0, " + std::to_string(c) + ")");
    auto z = logits.data();
    require_finite(z, "cross_entropy");
    const auto top = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    const double mx = z[top];
    double rest = 0.0;
    for (std::size_t i = 0; i < c; ++i)
        if (i != top) rest += std::exp(z[i] - mx);
    const double tail = std::log1p(rest);
    const double lse = mx + tail;
    Tensor out = tape.make_output({}, {&logits});
    out.data()[0] = (mx - z[target]) + tail;
    const Tensor ins[] = {logits};
    tape.record(out, ins, [o = out.storage(), sz = logits.storage(), target, lse] {
        const double g = o->grad[0];
        for (std::size_t i = 0; i < sz->value.size(); ++i) {
            const double p = std::exp(sz->value[i] - lse);
            sz->grad[i] += g * (p - (i == target ? 1.0 : 0.0));
        }
    });
    return out;
}

Tensor cross_entropy_2class(Tape& tape, const Tensor& logits, int target) {
    if (logits.size() != 2) {
        throw DimensionError("cross_entropy_2class: logits must have 2 entries, got " + shape_string(logits.shape()));
    }
    if (target != 0 && target != 1) throw DomainError("cross_entropy_2class: target must be 0 or 1");
    return cross_entropy(tape, logits, static_cast<std::size_t>(target));
}

Tensor binary_cross_entropy_with_logit(Tape& tape, const Tensor& logit, int target) {
    if (logit.size() != 1) throw DimensionError("binary_cross_entropy: expected one logit, got " + shape_string(logit.shape()));
    if (target != 0 && target != 1) throw DomainError("binary_cross_entropy: target must be 0 or 1");
    const double z = logit.data()[0];
    require_finite(logit.data(), "binary_cross_entropy");
    const double t = target;
    Tensor out = tape.make_output({}, {&logit});
    out.data()[0] = std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
    const Tensor ins[] = {logit};
    tape.record(out, ins, [o = out.storage(), sz = logit.storage(), t] {
        sz->grad[0] += o->grad[0] * (sigmoid_value(sz->value[0]) - t);
    });
    return out;
}

// ---- structural ------------------------------------------------------------

Tensor concat(Tape& tape, std::span<const Tensor> parts, std::size_t axis) {
    if (parts.empty()) throw ContractError("concat: no inputs");
    const auto& first = parts.front().shape();
    const std::size_t rank = first.size();
    if (rank == 0 || rank > 2 || axis >= rank) {
        throw DimensionError("concat: axis " + std::to_string(axis) + " invalid for " + shape_string(first));
    }
    Shape out_shape = first;
    out_shape[axis] = 0;
    for (const auto& p : parts) {
        const auto& sh = p.shape();
        bool ok = sh.size() == rank;
        for (std::size_t d = 0; ok && d < rank; ++d) ok = d == axis || sh[d] == first[d];
        if (!ok) throw DimensionError("concat: " + shape_string(sh) + " does not match " + shape_string(first) + " off axis " + std::to_string(axis));
        out_shape[axis] += sh[axis];
    }
    Tensor out = tape.make_output(out_shape, parts);

    // Rank 1 or axis 0 is a flat append; axis 1 interleaves row segments.
    const bool by_column = rank == 2 && axis == 1;
    const std::size_t rows = by_column ? first[0] : 1;
    const std::size_t out_cols = by_column ? out_shape[1] : 0;
    std::vector<StoragePtr> stores;
    std::vector<std::size_t> offsets;
    std::size_t offset = 0;
    for (const auto& p : parts) {
        stores.push_back(p.storage());
        offsets.push_back(offset);
        auto src = p.data();
        if (by_column) {
            const std::size_t w = p.shape()[1];
            for (std::size_t r = 0; r < rows; ++r)
                std::copy_n(src.begin() + r * w, w, out.data().begin() + r * out_cols + offset);
            offset += w;
        } else {
            std::copy(src.begin(), src.end(), out.data().begin() + offset);
            offset += src.size();
        }
    }
    tape.record(out, parts, [o = out.storage(), stores = std::move(stores), offsets = std::move(offsets), by_column, rows, out_cols] {
        for (std::size_t k = 0; k < stores.size(); ++k) {
            auto& s = *stores[k];
            if (!s.requires_grad) continue;
            if (by_column) {
                const std::size_t w = s.shape[1];
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < w; ++c) s.grad[r * w + c] += o->grad[r * out_cols + offsets[k] + c];
            } else {
                for (std::size_t i = 0; i < s.grad.size(); ++i) s.grad[i] += o->grad[offsets[k] + i];
            }
        }
    });
    return out;
}

Tensor concat(Tape& tape, std::initializer_list<Tensor> parts, std::size_t axis) {
    return concat(tape, std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor slice(Tape& tape, const Tensor& x, std::size_t axis, std::size_t start, std::size_t length) {
    if (x.rank() == 0 || x.rank() > 2 || axis >= x.rank() || start + length > x.shape()[axis]) {
        throw DimensionError("slice: [" + std::to_string(start) + ", " + std::to_string(start + length) +
                             ") along axis " + std::to_string(axis) + " of " + shape_string(x.shape()));
    }
    Shape sh = x.shape();
    sh[axis] = length;
    Tensor out = tape.make_output(sh, {&x});
    const bool by_column = x.rank() == 2 && axis == 1;
    const std::size_t rows = x.rows(), cols = x.cols();
    if (by_column) {
        for (std::size_t r = 0; r < rows; ++r)
            std::copy_n(x.data().begin() + r * cols + start, length, out.data().begin() + r * length);
    } else {
        const std::size_t unit = x.rank() == 2 ? cols : 1;
        std::copy_n(x.data().begin() + start * unit, length * unit, out.data().begin());
    }
    const Tensor ins[] = {x};
    tape.record(out, ins, [o = out.storage(), sx = x.storage(), by_column, rows, cols, start, length] {
        if (by_column) {
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < length; ++c) sx->grad[r * cols + start + c] += o->grad[r * length + c];
        } else {
            const std::size_t unit = sx->shape.size() == 2 ? cols : 1;
            for (std::size_t i = 0; i < o->grad.size(); ++i) sx->grad[start * unit + i] += o->grad[i];
        }
    });
    return out;
}

Tensor row(Tape& tape, const Tensor& x, std::size_t r) {
    if (x.rank() != 2) throw DimensionError("row: expected a matrix, got " + shape_string(x.shape()));
    return slice(tape, x, 0, r, 1);
}

Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::size_t> ids) {
    if (table.rank() != 2) throw DimensionError("gather_rows: table must be a matrix, got " + shape_string(table.shape()));
    const std::size_t cols = table.cols();
    for (auto id : ids) {
        if (id >= table.rows()) throw DimensionError("gather_rows: row " + std::to_string(id) + " outside table " + shape_string(table.shape()));
    }
    Tensor out = tape.make_output({ids.size(), cols}, {&table});
    for (std::size_t i = 0; i < ids.size(); ++i)
        std::copy_n(table.data().begin() + ids[i] * cols, cols, out.data().begin() + i * cols);
    const Tensor ins[] = {table};
    tape.record(out, ins, [o = out.storage(), st = table.storage(), ids = std::vector<std::size_t>(ids.begin(), ids.end()), cols] {
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t c = 0; c < cols; ++c) st->grad[ids[i] * cols + c] += o->grad[i * cols + c];
    });
    return out;
}

Tensor add_n(Tape& tape, std::span<const Tensor> terms) {
    if (terms.empty()) throw ContractError("add_n: no inputs");
    const Shape& shape = terms.front().shape();
    for (const auto& t : terms) {
        if (t.shape() != shape) throw DimensionError("add_n: " + shape_string(t.shape()) + " vs " + shape_string(shape));
    }
    Tensor out = tape.make_output(shape, terms);
    for (const auto& t : terms)
        for (std::size_t i = 0; i < t.size(); ++i) out.data()[i] += t.data()[i];
    std::vector<StoragePtr> stores;
    for (const auto& t : terms) stores.push_back(t.storage());
    tape.record(out, terms, [o = out.storage(), stores = std::move(stores)] {
        for (const auto& s : stores) {
            if (!s->requires_grad) continue;
            for (std::size_t i = 0; i < s->grad.size(); ++i) s->grad[i] += o->grad[i];
        }
    });
    return out;
}

Tensor sum(Tape& tape, const Tensor& x) {
    Tensor out = tape.make_output({}, {&x});
    double total = 0.0;
    for (double v : x.data()) total += v;
    out.data()[0] = total;
    const Tensor ins[] = {x};
    tape.record(out, ins, [o = out.storage(), sx = x.storage()] {
        for (auto& g : sx->grad) g += o->grad[0];
    });
    return out;
}

Tensor mean(Tape& tape, const Tensor& x) {
    if (x.size() == 0) throw ContractError("mean: empty tensor");
    return scale(tape, sum(tape, x), 1.0 / static_cast<double>(x.size()));
}

Tensor dropout(Tape& tape, const Tensor& x, double p, bool training, Rng& rng) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("dropout: p must lie in [0, 1), got " + std::to_string(p));
    if (!training || p == 0.0) return x;
    const double keep_scale = 1.0 / (1.0 - p);
    std::vector<double> mask(x.size());
    for (auto& m : mask) m = uniform01(rng) >= p ? keep_scale : 0.0;
    Tensor out = tape.make_output(x.shape(), {&x});
    for (std::size_t i = 0; i < mask.size(); ++i) out.data()[i] = x.data()[i] * mask[i];
    const Tensor ins[] = {x};
    tape.record(out, ins, [o = out.storage(), sx = x.storage(), mask = std::move(mask)] {
        for (std::size_t i = 0; i < mask.size(); ++i) sx->grad[i] += o->grad[i] * mask[i];
    });
    return out;
}

// ---- Adam ------------------------------------------------------------------

AdamState::AdamState(double lr, double b1, double b2, double eps)
    : beta1(b1), beta2(b2), epsilon(eps), learning_rate(lr) {
    if (!(lr > 0.0)) throw DomainError("adam: learning rate must be > 0");
    if (!(b1 > 0.0 && b1 < 1.0) || !(b2 > 0.0 && b2 < 1.0)) throw DomainError("adam: betas must lie in (0, 1)");
    if (!(eps > 0.0)) throw DomainError("adam: epsilon must be > 0");
}

void adam_step(std::span<Tensor> params, AdamState& state) {
    if (state.first_moment.empty()) {
        for (const auto& p : params) {
            state.first_moment.emplace_back(p.size(), 0.0);
            state.second_moment.emplace_back(p.size(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) {
        throw ContractError("adam: state tracks " + std::to_string(state.first_moment.size()) + " parameters, got " +
                            std::to_string(params.size()));
    }
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto value = params[k].data();
        auto grad = params[k].grad();
        auto& m = state.first_moment[k];
        auto& v = state.second_moment[k];
        if (m.size() != value.size() || v.size() != value.size()) {
            throw ContractError("adam: moment length does not match parameter " + std::to_string(k));
        }
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            value[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

// ---- gradient checking -----------------------------------------------------

double gradient_error(double analytic, double numeric, double tol, double abs_floor) {
    const double diff = std::abs(analytic - numeric);
    const double magnitude = std::max({std::abs(analytic), std::abs(numeric), abs_floor / tol});
    return diff / magnitude;
}

GradCheckReport grad_check(const LossBuilder& build, std::span<const NamedTensor> params, double h, double tol,
                           double abs_floor) {
    GradCheckReport report;
    report.tolerance = tol;

    auto evaluate = [&build] {
        Tape tape(false);
        return build(tape).item();
    };

    for (const auto& p : params) {
        Tensor t = p.tensor;
        t.zero_grad();
    }
    Tape tape;
    const Tensor loss = build(tape);
    tape.backward(loss);
    const double reference = loss.item();
    const double replay = evaluate();
    if (std::memcmp(&reference, &replay, sizeof(double)) != 0) {
        throw ContractError("grad_check: loss builder is not deterministic");
    }

    for (const auto& p : params) {
        Tensor t = p.tensor;
        GradCheckEntry entry{p.name, t.size(), 0.0};
        const std::vector<double> analytic(t.grad().begin(), t.grad().end());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double saved = t.data()[i];
            t.data()[i] = saved + h;
            const double up = evaluate();
            t.data()[i] = saved - h;
            const double down = evaluate();
            t.data()[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            entry.max_error = std::max(entry.max_error, gradient_error(analytic[i], numeric, tol, abs_floor));
        }
        report.max_error = std::max(report.max_error, entry.max_error);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace lvc::ad
