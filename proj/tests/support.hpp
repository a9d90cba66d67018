#pragma once

// Test-only oracles and helpers. Nothing here calls into the FFT or layer
// code it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "fttgru/rng.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::testing {

using cplx = std::complex<double>;

/// O(N^2) DFT. sign = -1 forward, +1 inverse (unnormalised).
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x, int sign = -1) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                               static_cast<double>(n);
            acc += x[j] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

inline std::vector<cplx> random_complex(std::size_t n, Rng& rng) {
    std::vector<cplx> v(n);
    for (auto& c : v) c = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return v;
}

inline std::vector<double> random_real(std::size_t n, Rng& rng, double lo = -1, double hi = 1) {
    std::vector<double> v(n);
    for (auto& c : v) c = rng.uniform(lo, hi);
    return v;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1, double hi = 1) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

/// Owning copy of a tensor's values, safe to iterate when the tensor is a temporary.
inline std::vector<double> values(const Tensor& t) { return t.values(); }

/// Naive triple loop with no shared code path.
inline Tensor naive_matmul(const Tensor& a, const Tensor& b) {
    Tensor out({a.dim(0), b.dim(1)});
    for (std::size_t i = 0; i < a.dim(0); ++i)
        for (std::size_t j = 0; j < b.dim(1); ++j) {
            double s = 0;
            for (std::size_t k = 0; k < a.dim(1); ++k) s += a.at(i, k) * b.at(k, j);
            out.at(i, j) = s;
        }
    return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Central difference of `loss` with respect to `*slot`.
inline double central_difference(double* slot, const std::function<double()>& loss, double h = 1e-6) {
    const double saved = *slot;
    *slot = saved + h;
    const double up = loss();
    *slot = saved - h;
    const double down = loss();
    *slot = saved;
    return (up - down) / (2.0 * h);
}

/// Relative error with an absolute floor so that near-zero gradients do not blow up.
inline double rel_err(double analytic, double numeric, double floor = 1e-6) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// sum(y * weights)
inline double weighted_sum(const Tensor& y, const Tensor& weights) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * weights[i];
    return s;
}

} // namespace fttgru::testing
