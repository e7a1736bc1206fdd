#pragma once

// Central finite-difference gradient checking. The checker only evaluates the
// forward pass of the function under test, so it is independent of every
// backward rule it verifies.
//
// Tolerances used throughout the project:
//   float  : eps 1e-3, max relative error 1e-4
//   double : eps 1e-5, max relative error 1e-7

#include "fagan/tensor.hpp"

#include <functional>
#include <limits>
#include <type_traits>

namespace fagan {

template <typename T>
struct GradCheckResult {
    T max_rel_error = T(0);
    std::size_t worst_input = 0;
    std::size_t worst_index = 0;
    bool ok(T tol) const { return max_rel_error < tol; }
};

template <typename T>
constexpr T gradcheck_eps() {
    if constexpr (sizeof(T) == 4)
        return T(1e-3);
    else
        return T(1e-5);
}

template <typename T>
constexpr T gradcheck_tol() {
    if constexpr (sizeof(T) == 4)
        return T(1e-4);
    else
        return T(1e-7);
}

// f maps the inputs to a scalar loss tensor; it must be callable for both
// precisions (a generic lambda) when T is float. The analytic gradient comes
// from one backward() pass at precision T. The finite differences are always
// evaluated on a double forward: at 32 bits a pure-float difference quotient
// drowns in forward rounding long before the 1e-4 tolerance.
template <typename T, typename F>
GradCheckResult<T> gradcheck(F&& f, std::vector<Tensor<T>> inputs, T eps = gradcheck_eps<T>()) {
    for (auto& in : inputs) {
        in.set_requires_grad(true);
        in.zero_grad();
    }
    Tensor<T> loss = f(inputs);
    loss.backward();

    // At double precision the differences are taken on the handles passed in,
    // so functions may read the same tensors through captured state. At float
    // the forward is re-evaluated on double copies (a pure-float quotient
    // cannot resolve the 1e-4 tolerance), so the function must read only the
    // tensors it is handed.
    std::vector<Tensor<double>> dinputs;
    if constexpr (!std::is_same_v<T, double>) {
        for (auto& in : inputs) {
            std::vector<double> d(in.data().begin(), in.data().end());
            dinputs.emplace_back(in.shape(), std::move(d));
        }
    }
    const double deps = static_cast<double>(eps);
    auto eval = [&](std::size_t k, std::size_t i, double value) -> double {
        if constexpr (std::is_same_v<T, double>) {
            auto& in = inputs[k];
            const T orig = in.at(i);
            in.mutable_data()[i] = static_cast<T>(value);
            const double r = static_cast<double>(f(inputs).item());
            in.mutable_data()[i] = orig;
            return r;
        } else {
            auto& din = dinputs[k];
            const double orig = din.at(i);
            din.mutable_data()[i] = value;
            const double r = f(dinputs).item();
            din.mutable_data()[i] = orig;
            return r;
        }
    };

    GradCheckResult<T> res;
    const double target = static_cast<double>(gradcheck_tol<T>());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        for (std::size_t i = 0; i < inputs[k].numel(); ++i) {
            const double orig = static_cast<double>(inputs[k].at(i));
            const double analytic = static_cast<double>(inputs[k].grad_at(i));
            T rel = std::numeric_limits<T>::max();
            // Halve the step when over tolerance: a ReLU kink inside the
            // stencil shrinks away, a wrong backward rule does not.
            double h = deps;
            for (int attempt = 0; attempt < 4 && static_cast<double>(rel) >= target; ++attempt, h *= 0.5) {
                const double fp = eval(k, i, orig + h);
                const double fm = eval(k, i, orig - h);
                const double numeric = (fp - fm) / (2.0 * h);
                const double denom = std::max({std::abs(numeric), std::abs(analytic), 1.0});
                rel = std::min(rel, static_cast<T>(std::abs(numeric - analytic) / denom));
            }
            if (rel > res.max_rel_error) {
                res.max_rel_error = rel;
                res.worst_input = k;
                res.worst_index = i;
            }
        }
    }
    return res;
}

}  // namespace fagan
