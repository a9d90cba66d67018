#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fttgru/nn/parameter.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::nn {

struct LayerNormCache {
    const void* owner = nullptr;
    Tensor normalized;              // x_hat, same shape as input
    std::vector<double> inv_std;    // one per row
};

/// Normalises each row over the last axis, then scales by gamma and shifts by beta.
class LayerNorm {
public:
    LayerNorm() = default;

    LayerNorm(std::string name, std::size_t width, double eps = 1e-5)
        : gamma(name + ".gamma", Tensor({width}, 1.0)), beta(name + ".beta", Tensor({width})), eps_(eps) {
        if (!(eps > 0.0)) {
            throw ConfigError(name + ": layer norm eps must be positive");
        }
    }

    std::size_t width() const { return gamma.value.dim(0); }
    double eps() const noexcept { return eps_; }

    Tensor apply(const Tensor& x) const {
        LayerNormCache scratch;
        return forward(x, scratch);
    }

    Tensor forward(const Tensor& x, LayerNormCache& cache) const {
        check_input(x);
        const std::size_t d = width();
        const std::size_t rows = leading_rows(x);
        cache.owner = this;
        cache.normalized = Tensor(x.shape());
        cache.inv_std.assign(rows, 0.0);
        Tensor y(x.shape());
        const double* g = gamma.value.data().data();
        const double* b = beta.value.data().data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* in = x.data().data() + r * d;
            double mean = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                mean += in[j];
            }
            mean /= static_cast<double>(d);
            double var = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                var += (in[j] - mean) * (in[j] - mean);
            }
            var /= static_cast<double>(d);
            const double inv = 1.0 / std::sqrt(var + eps_);
            cache.inv_std[r] = inv;
            double* xh = cache.normalized.data().data() + r * d;
            double* out = y.data().data() + r * d;
            for (std::size_t j = 0; j < d; ++j) {
                xh[j] = (in[j] - mean) * inv;
                out[j] = g[j] * xh[j] + b[j];
            }
        }
        return y;
    }

    Tensor backward(const Tensor& dy, const LayerNormCache& cache) {
        if (cache.owner != this) {
            throw ShapeError(gamma.name + ": backward called with a cache from another layer");
        }
        dy.require_shape(cache.normalized.shape(), gamma.name + " backward");
        const std::size_t d = width();
        const std::size_t rows = leading_rows(dy);
        const double inv_d = 1.0 / static_cast<double>(d);
        const double* g = gamma.value.data().data();
        double* dg = gamma.grad.data().data();
        double* db = beta.grad.data().data();
        Tensor dx(dy.shape());
        for (std::size_t r = 0; r < rows; ++r) {
            const double* up = dy.data().data() + r * d;
            const double* xh = cache.normalized.data().data() + r * d;
            double sum_dxh = 0.0;
            double sum_dxh_xh = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                dg[j] += up[j] * xh[j];
                db[j] += up[j];
                const double dxh = up[j] * g[j];
                sum_dxh += dxh;
                sum_dxh_xh += dxh * xh[j];
            }
            double* out = dx.data().data() + r * d;
            const double inv = cache.inv_std[r];
            for (std::size_t j = 0; j < d; ++j) {
                const double dxh = up[j] * g[j];
                out[j] = inv * (dxh - inv_d * sum_dxh - xh[j] * inv_d * sum_dxh_xh);
            }
        }
        return dx;
    }

    void collect(ParameterRefs& out) {
        out.push_back(&gamma);
        out.push_back(&beta);
    }

    Parameter gamma;
    Parameter beta;

private:
    void check_input(const Tensor& x) const {
        if (x.rank() == 0 || x.shape().back() != width()) {
            throw ShapeError(gamma.name + ": expected last axis " + std::to_string(width()) + ", got " +
                             shape_string(x.shape()));
        }
    }

    double eps_ = 1e-5;
};

} // namespace fttgru::nn
