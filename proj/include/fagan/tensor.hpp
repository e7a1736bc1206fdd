#pragma once

// Dense tensor with reverse-mode automatic differentiation.
// Tensors are shared handles onto graph nodes; operations record a backward
// closure that scatters the output gradient into the parents. Storage is
// row-major. The scalar type is a template parameter: float for training,
// double for gradient-oracle runs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace fagan {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

inline std::vector<std::size_t> row_major_strides(const Shape& s) {
    std::vector<std::size_t> strides(s.size(), 1);
    for (std::size_t i = s.size(); i-- > 1;) strides[i - 1] = strides[i] * s[i];
    return strides;
}

template <typename T>
struct TensorNode {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;  // sized lazily on first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<TensorNode<T>>> parents;
    std::function<void(TensorNode<T>&)> backward_fn;  // reads this->grad, scatters into parents
    const char* op = "leaf";

    std::size_t numel() const { return data.size(); }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    }
    void accumulate(std::size_t i, T v) {
        ensure_grad();
        grad[i] += v;
    }
};

template <typename T>
class Tensor {
  public:
    using Node = TensorNode<T>;

    Tensor() : node_(std::make_shared<Node>()) {}

    Tensor(Shape shape, std::vector<T> data, bool requires_grad = false)
        : node_(std::make_shared<Node>()) {
        if (shape_numel(shape) != data.size())
            throw DimensionError("tensor: shape " + shape_str(shape) + " does not match data length " +
                                 std::to_string(data.size()));
        node_->shape = std::move(shape);
        node_->data = std::move(data);
        node_->requires_grad = requires_grad;
    }

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        std::size_t n = shape_numel(shape);
        return Tensor(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
    }
    static Tensor full(Shape shape, T value, bool requires_grad = false) {
        std::size_t n = shape_numel(shape);
        return Tensor(std::move(shape), std::vector<T>(n, value), requires_grad);
    }
    static Tensor ones(Shape shape, bool requires_grad = false) {
        return full(std::move(shape), T(1), requires_grad);
    }
    static Tensor scalar(T value, bool requires_grad = false) {
        return Tensor(Shape{}, std::vector<T>{value}, requires_grad);
    }
    // Uniform in [lo, hi) from raw mt19937 draws; bit-reproducible across platforms.
    static Tensor uniform(Shape shape, T lo, T hi, std::mt19937& rng, bool requires_grad = false) {
        std::size_t n = shape_numel(shape);
        std::vector<T> d(n);
        for (auto& v : d) {
            double u = static_cast<double>(rng()) / 4294967296.0;
            v = static_cast<T>(lo + (hi - lo) * static_cast<T>(u));
        }
        return Tensor(std::move(shape), std::move(d), requires_grad);
    }

    const Shape& shape() const { return node_->shape; }
    std::size_t numel() const { return node_->data.size(); }
    std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
    std::size_t rank() const { return node_->shape.size(); }
    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool r) { node_->requires_grad = r; }

    std::span<const T> data() const { return node_->data; }
    std::span<T> mutable_data() { return node_->data; }
    std::span<const T> grad() const { return node_->grad; }
    bool has_grad() const { return !node_->grad.empty(); }

    T item() const {
        if (numel() != 1) throw ContractError("item(): tensor is not scalar");
        return node_->data[0];
    }
    T at(std::size_t flat) const { return node_->data.at(flat); }
    T grad_at(std::size_t flat) const { return node_->grad.at(flat); }

    void zero_grad() { node_->grad.assign(node_->data.size(), T(0)); }
    void clear_grad() { node_->grad.clear(); }

    std::shared_ptr<Node> node() const { return node_; }

    // Runs reverse-mode accumulation from a scalar loss. Leaf gradients add
    // onto whatever is already stored (call zero_grad() between passes);
    // intermediate-node gradients are reset on every pass.
    void backward() const {
        if (numel() != 1) throw ContractError("backward(): loss must be scalar");
        std::vector<Node*> order;
        std::unordered_set<Node*> seen;
        topo(node_.get(), seen, order);
        for (Node* n : order)
            if (n->backward_fn) n->grad.assign(n->data.size(), T(0));
        node_->ensure_grad();
        node_->grad[0] += T(1);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            Node* n = *it;
            if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
        }
    }

  private:
    static std::size_t shape_numel_of(const Shape& s) { return shape_numel(s); }

    static void topo(Node* n, std::unordered_set<Node*>& seen, std::vector<Node*>& order) {
        // Iterative DFS; parent order fixes the visitation order, so the
        // resulting gradient accumulation order is deterministic.
        struct Frame {
            Node* node;
            std::size_t next;
        };
        if (seen.count(n)) return;
        std::vector<Frame> stack{{n, 0}};
        seen.insert(n);
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < f.node->parents.size()) {
                Node* p = f.node->parents[f.next++].get();
                if (!seen.count(p)) {
                    seen.insert(p);
                    stack.push_back({p, 0});
                }
            } else {
                order.push_back(f.node);
                stack.pop_back();
            }
        }
    }

    std::shared_ptr<Node> node_;
};

namespace detail {

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data, const char* op,
                      std::vector<std::shared_ptr<TensorNode<T>>> parents,
                      std::function<void(TensorNode<T>&)> backward_fn) {
    Tensor<T> out(std::move(shape), std::move(data));
    auto node = out.node();
    node->op = op;
    bool any_grad = false;
    for (auto& p : parents) any_grad = any_grad || p->requires_grad || p->backward_fn;
    if (any_grad) {
        node->requires_grad = true;
        node->parents = std::move(parents);
        node->backward_fn = std::move(backward_fn);
    }
    return out;
}

// Broadcasting: trailing-dimension alignment, dims must match or be 1.
inline Shape broadcast_shape(const Shape& a, const Shape& b) {
    Shape out(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t da = i < out.size() - a.size() ? 1 : a[i - (out.size() - a.size())];
        std::size_t db = i < out.size() - b.size() ? 1 : b[i - (out.size() - b.size())];
        if (da != db && da != 1 && db != 1)
            throw DimensionError("broadcast: incompatible shapes " + shape_str(a) + " and " + shape_str(b));
        out[i] = std::max(da, db);
    }
    return out;
}

// Strides of `in` viewed under the broadcast shape `out` (0 on broadcast axes).
inline std::vector<std::size_t> broadcast_strides(const Shape& in, const Shape& out) {
    auto st = row_major_strides(in);
    std::vector<std::size_t> r(out.size(), 0);
    std::size_t off = out.size() - in.size();
    for (std::size_t i = 0; i < in.size(); ++i) r[off + i] = in[i] == 1 ? 0 : st[i];
    return r;
}

template <typename T, typename Fwd, typename DA, typename DB>
Tensor<T> binary_op(const Tensor<T>& a, const Tensor<T>& b, const char* op, Fwd fwd, DA da, DB db) {
    Shape oshape = broadcast_shape(a.shape(), b.shape());
    std::size_t n = shape_numel(oshape);
    auto sa = broadcast_strides(a.shape(), oshape);
    auto sb = broadcast_strides(b.shape(), oshape);
    auto so = row_major_strides(oshape);
    auto an = a.node();
    auto bn = b.node();
    std::vector<T> data(n);
    std::vector<std::size_t> idx(oshape.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ia = 0, ib = 0, rem = i;
        for (std::size_t d = 0; d < oshape.size(); ++d) {
            std::size_t c = rem / so[d];
            rem %= so[d];
            ia += c * sa[d];
            ib += c * sb[d];
        }
        data[i] = fwd(an->data[ia], bn->data[ib]);
    }
    auto backward = [an, bn, oshape, sa, sb, so, da, db](TensorNode<T>& out) {
        for (std::size_t i = 0; i < out.grad.size(); ++i) {
            std::size_t ia = 0, ib = 0, rem = i;
            for (std::size_t d = 0; d < oshape.size(); ++d) {
                std::size_t c = rem / so[d];
                rem %= so[d];
                ia += c * sa[d];
                ib += c * sb[d];
            }
            T g = out.grad[i];
            if (an->requires_grad || an->backward_fn) an->accumulate(ia, g * da(an->data[ia], bn->data[ib]));
            if (bn->requires_grad || bn->backward_fn) bn->accumulate(ib, g * db(an->data[ia], bn->data[ib]));
        }
    };
    return make_result<T>(std::move(oshape), std::move(data), op, {an, bn}, backward);
}

template <typename T, typename Fwd, typename Dx>
Tensor<T> unary_op(const Tensor<T>& x, const char* op, Fwd fwd, Dx dx) {
    auto xn = x.node();
    std::vector<T> data(xn->data.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = fwd(xn->data[i]);
    auto backward = [xn, dx](TensorNode<T>& out) {
        for (std::size_t i = 0; i < out.grad.size(); ++i) xn->accumulate(i, out.grad[i] * dx(xn->data[i]));
    };
    return make_result<T>(x.shape(), std::move(data), op, {xn}, backward);
}

}  // namespace detail

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    return detail::binary_op(
        a, b, "add", [](T x, T y) { return x + y; }, [](T, T) { return T(1); }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    return detail::binary_op(
        a, b, "sub", [](T x, T y) { return x - y; }, [](T, T) { return T(1); }, [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    return detail::binary_op(
        a, b, "mul", [](T x, T y) { return x * y; }, [](T, T y) { return y; }, [](T x, T) { return x; });
}

template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
    return detail::binary_op(
        a, b, "div", [](T x, T y) { return x / y; }, [](T, T y) { return T(1) / y; },
        [](T x, T y) { return -x / (y * y); });
}

template <typename T, typename C>
Tensor<T> scalar_mul(const Tensor<T>& x, C c_) {
    const T c = static_cast<T>(c_);
    return detail::unary_op(
        x, "scalar_mul", [c](T v) { return c * v; }, [c](T) { return c; });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    // subgradient at 0 is 0
    return detail::unary_op(
        x, "relu", [](T v) { return v > T(0) ? v : T(0); }, [](T v) { return v > T(0) ? T(1) : T(0); });
}

template <typename T, typename C>
Tensor<T> leaky_relu(const Tensor<T>& x, C slope_) {
    const T slope = static_cast<T>(slope_);
    return detail::unary_op(
        x, "leaky_relu", [slope](T v) { return v > T(0) ? v : slope * v; },
        [slope](T v) { return v > T(0) ? T(1) : slope; });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    return detail::unary_op(
        x, "sigmoid",
        [](T v) {
            if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
            T e = std::exp(v);
            return e / (T(1) + e);
        },
        [](T v) {
            T s;
            if (v >= T(0))
                s = T(1) / (T(1) + std::exp(-v));
            else {
                T e = std::exp(v);
                s = e / (T(1) + e);
            }
            return s * (T(1) - s);
        });
}

template <typename T>
Tensor<T> log(const Tensor<T>& x) {
    for (T v : x.data())
        if (!(v > T(0))) throw std::domain_error("log: non-positive input; clamp probabilities first");
    return detail::unary_op(
        x, "log", [](T v) { return std::log(v); }, [](T v) { return T(1) / v; });
}

// clamp to [lo, hi]; zero gradient outside the interval
template <typename T, typename C>
Tensor<T> clamp(const Tensor<T>& x, C lo_, C hi_) {
    const T lo = static_cast<T>(lo_), hi = static_cast<T>(hi_);
    return detail::unary_op(
        x, "clamp", [lo, hi](T v) { return std::clamp(v, lo, hi); },
        [lo, hi](T v) { return (v >= lo && v <= hi) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> abs_square(const Tensor<T>& x) {
    return detail::unary_op(
        x, "abs_square", [](T v) { return v * v; }, [](T v) { return T(2) * v; });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
    auto xn = x.node();
    T s = T(0);
    for (T v : xn->data) s += v;
    auto backward = [xn](TensorNode<T>& out) {
        T g = out.grad[0];
        for (std::size_t i = 0; i < xn->data.size(); ++i) xn->accumulate(i, g);
    };
    return detail::make_result<T>(Shape{}, {s}, "sum", {xn}, backward);
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
    auto xn = x.node();
    T s = T(0);
    for (T v : xn->data) s += v;
    T n = static_cast<T>(xn->data.size());
    auto backward = [xn, n](TensorNode<T>& out) {
        T g = out.grad[0] / n;
        for (std::size_t i = 0; i < xn->data.size(); ++i) xn->accumulate(i, g);
    };
    return detail::make_result<T>(Shape{}, {s / n}, "mean", {xn}, backward);
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2) throw DimensionError("matmul: operands must be rank-2");
    std::size_t M = a.dim(0), K = a.dim(1), K2 = b.dim(0), N = b.dim(1);
    if (K != K2)
        throw DimensionError("matmul: inner dimensions disagree: " + shape_str(a.shape()) + " x " +
                             shape_str(b.shape()));
    auto an = a.node();
    auto bn = b.node();
    std::vector<T> out(M * N, T(0));
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t k = 0; k < K; ++k) {
            T av = an->data[i * K + k];
            for (std::size_t j = 0; j < N; ++j) out[i * N + j] += av * bn->data[k * N + j];
        }
    auto backward = [an, bn, M, K, N](TensorNode<T>& o) {
        if (an->requires_grad || an->backward_fn) {
            an->ensure_grad();
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t j = 0; j < N; ++j) {
                    T g = o.grad[i * N + j];
                    for (std::size_t k = 0; k < K; ++k) an->grad[i * K + k] += g * bn->data[k * N + j];
                }
        }
        if (bn->requires_grad || bn->backward_fn) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t k = 0; k < K; ++k) {
                    T av = an->data[i * K + k];
                    for (std::size_t j = 0; j < N; ++j) bn->grad[k * N + j] += av * o.grad[i * N + j];
                }
        }
    };
    return detail::make_result<T>(Shape{M, N}, std::move(out), "matmul", {an, bn}, backward);
}

// Numerically stable softmax (max subtraction) along one axis.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
    if (axis >= x.rank()) throw DimensionError("softmax: axis out of bounds");
    auto xn = x.node();
    const Shape& s = x.shape();
    auto strides = row_major_strides(s);
    std::size_t len = s[axis], stride = strides[axis];
    std::size_t outer = x.numel() / len;
    std::vector<T> out(x.numel());
    auto slice_base = [stride, len](std::size_t slice) {
        // flat index of element 0 of the slice-th lane along `axis`
        std::size_t lo = slice % stride;
        std::size_t hi = slice / stride;
        return hi * stride * len + lo;
    };
    for (std::size_t sl = 0; sl < outer; ++sl) {
        std::size_t base = slice_base(sl);
        T mx = xn->data[base];
        for (std::size_t k = 1; k < len; ++k) mx = std::max(mx, xn->data[base + k * stride]);
        T z = T(0);
        for (std::size_t k = 0; k < len; ++k) {
            T e = std::exp(xn->data[base + k * stride] - mx);
            out[base + k * stride] = e;
            z += e;
        }
        for (std::size_t k = 0; k < len; ++k) out[base + k * stride] /= z;
    }
    // backward reads the softmax values straight from the output node
    auto backward = [xn, len, stride, outer, slice_base](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t sl = 0; sl < outer; ++sl) {
            std::size_t base = slice_base(sl);
            T dot = T(0);
            for (std::size_t k = 0; k < len; ++k) {
                std::size_t i = base + k * stride;
                dot += o.grad[i] * o.data[i];
            }
            for (std::size_t k = 0; k < len; ++k) {
                std::size_t i = base + k * stride;
                xn->grad[i] += o.data[i] * (o.grad[i] - dot);
            }
        }
    };
    return detail::make_result<T>(s, std::move(out), "softmax", {xn}, backward);
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape new_shape) {
    if (shape_numel(new_shape) != x.numel())
        throw DimensionError("reshape: element count mismatch, " + shape_str(x.shape()) + " -> " +
                             shape_str(new_shape));
    auto xn = x.node();
    auto backward = [xn](TensorNode<T>& o) {
        for (std::size_t i = 0; i < o.grad.size(); ++i) xn->accumulate(i, o.grad[i]);
    };
    return detail::make_result<T>(std::move(new_shape), std::vector<T>(xn->data), "reshape", {xn}, backward);
}

template <typename T>
Tensor<T> transpose2(const Tensor<T>& x) {
    if (x.rank() != 2) throw DimensionError("transpose2: rank-2 tensor required");
    std::size_t M = x.dim(0), N = x.dim(1);
    auto xn = x.node();
    std::vector<T> out(M * N);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) out[j * M + i] = xn->data[i * N + j];
    auto backward = [xn, M, N](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < N; ++j) xn->grad[i * N + j] += o.grad[j * M + i];
    };
    return detail::make_result<T>(Shape{N, M}, std::move(out), "transpose2", {xn}, backward);
}

// Contiguous sub-range along one axis.
template <typename T>
Tensor<T> narrow(const Tensor<T>& x, std::size_t axis, std::size_t start, std::size_t len) {
    if (axis >= x.rank()) throw DimensionError("narrow: axis out of bounds");
    if (start + len > x.dim(axis)) throw DimensionError("narrow: range exceeds dimension");
    const Shape& s = x.shape();
    Shape os = s;
    os[axis] = len;
    auto strides = row_major_strides(s);
    std::size_t inner = strides[axis];
    std::size_t block = inner * len;
    std::size_t src_block = inner * s[axis];
    std::size_t outer = x.numel() / src_block;
    auto xn = x.node();
    std::vector<T> out(shape_numel(os));
    for (std::size_t b = 0; b < outer; ++b)
        std::copy_n(xn->data.begin() + b * src_block + start * inner, block, out.begin() + b * block);
    auto backward = [xn, outer, block, src_block, inner, start](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t b = 0; b < outer; ++b)
            for (std::size_t i = 0; i < block; ++i) xn->grad[b * src_block + start * inner + i] += o.grad[b * block + i];
    };
    return detail::make_result<T>(std::move(os), std::move(out), "narrow", {xn}, backward);
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& xs, std::size_t axis) {
    if (xs.empty()) throw ContractError("concat: empty input list");
    const Shape& s0 = xs[0].shape();
    if (axis >= s0.size()) throw DimensionError("concat: axis out of bounds");
    std::size_t total = 0;
    for (const auto& x : xs) {
        const Shape& s = x.shape();
        if (s.size() != s0.size()) throw DimensionError("concat: rank mismatch");
        for (std::size_t d = 0; d < s.size(); ++d)
            if (d != axis && s[d] != s0[d])
                throw DimensionError("concat: shapes differ off-axis: " + shape_str(s0) + " vs " + shape_str(s));
        total += s[axis];
    }
    Shape os = s0;
    os[axis] = total;
    auto strides = row_major_strides(s0);
    std::size_t inner = strides[axis];
    std::size_t outer = shape_numel(os) / (inner * total);
    std::vector<T> out(shape_numel(os));
    std::vector<std::shared_ptr<TensorNode<T>>> parents;
    std::vector<std::size_t> lens;
    for (const auto& x : xs) {
        parents.push_back(x.node());
        lens.push_back(x.dim(axis));
    }
    std::size_t offset = 0;
    for (std::size_t p = 0; p < parents.size(); ++p) {
        std::size_t blk = inner * lens[p];
        for (std::size_t b = 0; b < outer; ++b)
            std::copy_n(parents[p]->data.begin() + b * blk, blk, out.begin() + b * inner * total + offset * inner);
        offset += lens[p];
    }
    auto ps = parents;
    auto backward = [ps, lens, inner, total, outer](TensorNode<T>& o) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < ps.size(); ++p) {
            std::size_t blk = inner * lens[p];
            if (ps[p]->requires_grad || ps[p]->backward_fn) {
                ps[p]->ensure_grad();
                for (std::size_t b = 0; b < outer; ++b)
                    for (std::size_t i = 0; i < blk; ++i)
                        ps[p]->grad[b * blk + i] += o.grad[b * inner * total + off * inner + i];
            }
            off += lens[p];
        }
    };
    return detail::make_result<T>(std::move(os), std::move(out), "concat", std::move(parents), backward);
}

}  // namespace fagan
