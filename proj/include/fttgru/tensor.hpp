#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fttgru/error.hpp"

namespace fttgru {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << (i ? "," : "") << shape[i];
    }
    os << ']';
    return os.str();
}

/// Dense row-major array of doubles.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
        check_dims();
    }

    Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), data_(std::move(values)) {
        check_dims();
        if (data_.size() != shape_size(shape_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string(shape_));
        }
    }

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::vector<double>& values() noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    /// Same data viewed under a new shape of equal element count.
    Tensor reshaped(Shape shape) const& {
        if (shape_size(shape) != data_.size()) {
            throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
        }
        return Tensor(std::move(shape), data_);
    }
    Tensor reshaped(Shape shape) && {
        if (shape_size(shape) != data_.size()) {
            throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
        }
        return Tensor(std::move(shape), std::move(data_));
    }

    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    void require_finite(std::string_view where) const {
        if (!all_finite()) {
            throw NumericError("non-finite value in " + std::string(where));
        }
    }

    Tensor& operator+=(const Tensor& other) {
        require_same_shape(other, "operator+=");
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += other.data_[i];
        }
        return *this;
    }

    Tensor& operator*=(double s) {
        for (double& v : data_) {
            v *= s;
        }
        return *this;
    }

    void require_same_shape(const Tensor& other, std::string_view where) const {
        if (shape_ != other.shape_) {
            throw ShapeError(std::string(where) + ": shape " + shape_string(shape_) + " vs " +
                             shape_string(other.shape_));
        }
    }

    void require_shape(const Shape& expected, std::string_view where) const {
        if (shape_ != expected) {
            throw ShapeError(std::string(where) + ": expected shape " + shape_string(expected) +
                             ", got " + shape_string(shape_));
        }
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    void check_dims() const {
        for (std::size_t d : shape_) {
            if (d == 0) {
                throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
            }
        }
    }

    Shape shape_;
    std::vector<double> data_;
};

inline Tensor operator+(Tensor a, const Tensor& b) {
    a += b;
    return a;
}

/// Number of rows when the last axis is treated as the feature axis.
inline std::size_t leading_rows(const Tensor& t) { return t.size() / t.shape().back(); }

/// y[M,N] = a[M,K] * b[K,N]. Summation over K runs in ascending order.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible shapes " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
    }
    const std::size_t m = a.dim(0);
    const std::size_t k = a.dim(1);
    const std::size_t n = b.dim(1);
    Tensor out({m, n});
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* po = out.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        double* row = po + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double s = pa[i * k + p];
            const double* brow = pb + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] += s * brow[j];
            }
        }
    }
    return out;
}

namespace kernels {

// Raw row-major kernels shared by the layers. Shapes are the caller's
// responsibility; every loop runs in a fixed order.

namespace detail {

/// Scalar reference for one block: rows [i0, i1), columns [j0, j1).
inline void gemm_block(const double* a, std::size_t ai, std::size_t ap, const double* b, std::size_t ldb,
                       double* out, std::size_t ldo, std::size_t i0, std::size_t i1, std::size_t k,
                       std::size_t j0, std::size_t j1) {
    for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = j0; j < j1; ++j) {
            double acc = out[i * ldo + j];
            for (std::size_t p = 0; p < k; ++p) {
                acc += a[i * ai + p * ap] * b[p * ldb + j];
            }
            out[i * ldo + j] = acc;
        }
    }
}

#if defined(__GNUC__)
#if defined(__AVX512F__)
inline constexpr std::size_t kLanes = 8;
#elif defined(__AVX__)
inline constexpr std::size_t kLanes = 4;
#else
inline constexpr std::size_t kLanes = 2;
#endif
typedef double Vec __attribute__((vector_size(kLanes * sizeof(double))));

inline Vec load(const double* p) {
    Vec v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

inline void store(double* p, Vec v) { std::memcpy(p, &v, sizeof v); }
#endif

/// out[i*ldo + j] += sum_p A(i,p) * b[p*ldb + j], where A(i,p) = a[i*ai + p*ap].
/// Register-tiled in blocks of 4 rows by two vector widths; the sum over p always runs in increasing order,
/// so every element matches the scalar loop bit for bit.
inline void gemm_tiled(const double* a, std::size_t ai, std::size_t ap, const double* b, std::size_t ldb,
                       double* out, std::size_t ldo, std::size_t m, std::size_t k, std::size_t n) {
#if defined(__GNUC__)
    constexpr std::size_t ti = 4, nv = 2, tj = nv * kLanes;
#else
    constexpr std::size_t ti = 4, tj = 8;
#endif
    const std::size_t m4 = m - m % ti, n8 = n - n % tj;
#if defined(__GNUC__)
    for (std::size_t i = 0; i < m4; i += ti) {
        for (std::size_t j = 0; j < n8; j += tj) {
            double* o = out + i * ldo + j;
            Vec acc[ti][nv];
            for (std::size_t r = 0; r < ti; ++r) {
                for (std::size_t v = 0; v < nv; ++v) {
                    acc[r][v] = load(o + r * ldo + v * kLanes);
                }
            }
            const double* arow = a + i * ai;
            for (std::size_t p = 0; p < k; ++p) {
                const double* brow = b + p * ldb + j;
                Vec bv[nv];
                for (std::size_t v = 0; v < nv; ++v) {
                    bv[v] = load(brow + v * kLanes);
                }
                for (std::size_t r = 0; r < ti; ++r) {
                    const double s = arow[r * ai + p * ap];
                    for (std::size_t v = 0; v < nv; ++v) {
                        acc[r][v] += s * bv[v];
                    }
                }
            }
            for (std::size_t r = 0; r < ti; ++r) {
                for (std::size_t v = 0; v < nv; ++v) {
                    store(o + r * ldo + v * kLanes, acc[r][v]);
                }
            }
        }
    }
#else
    gemm_block(a, ai, ap, b, ldb, out, ldo, 0, m4, k, 0, n8);
#endif
    gemm_block(a, ai, ap, b, ldb, out, ldo, 0, m4, k, n8, n);
    gemm_block(a, ai, ap, b, ldb, out, ldo, m4, m, k, 0, n);
}

} // namespace detail

/// out[m,n] (+)= a[m,k] * b[k,n]
inline void gemm(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate) {
    if (!accumulate) {
        std::fill(out, out + m * n, 0.0);
    }
    detail::gemm_tiled(a, k, 1, b, n, out, n, m, k, n);
}

/// out[k,n] += a[m,k]^T * b[m,n]
inline void gemm_at_b(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
                      std::size_t n) {
    detail::gemm_tiled(a, 1, k, b, n, out, n, k, m, n);
}

/// out[m,k] (+)= a[m,n] * b[k,n]^T
inline void gemm_a_bt(const double* a, const double* b, double* out, std::size_t m, std::size_t n,
                      std::size_t k, bool accumulate) {
    std::vector<double> bt(n * k);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t j = 0; j < n; ++j) {
            bt[j * k + p] = b[p * n + j];
        }
    }
    gemm(a, bt.data(), out, m, n, k, accumulate);
}

} // namespace kernels

} // namespace fttgru
