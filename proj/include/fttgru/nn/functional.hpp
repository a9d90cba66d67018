#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "fttgru/error.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::nn {

/// Sinusoidal position table [T, D]:
/// PE[t, 2i] = sin(t / 10000^(2i/D)), PE[t, 2i+1] = cos(t / 10000^(2i/D)).
inline Tensor positional_encoding(std::size_t steps, std::size_t width) {
    if (width == 0 || width % 2 != 0) {
        throw ShapeError("positional_encoding: width must be even and positive, got " + std::to_string(width));
    }
    if (steps == 0) {
        throw ShapeError("positional_encoding: steps must be positive");
    }
    Tensor pe({steps, width});
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < width / 2; ++i) {
            const double freq = std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(width));
            const double angle = static_cast<double>(t) / freq;
            pe.at(t, 2 * i) = std::sin(angle);
            pe.at(t, 2 * i + 1) = std::cos(angle);
        }
    }
    return pe;
}

/// x[B,T,D] += pe[T,D] broadcast over the batch.
inline void add_positional(Tensor& x, const Tensor& pe) {
    if (x.rank() != 3 || x.dim(1) != pe.dim(0) || x.dim(2) != pe.dim(1)) {
        throw ShapeError("add_positional: input " + shape_string(x.shape()) + " vs table " +
                         shape_string(pe.shape()));
    }
    const std::size_t block = pe.size();
    for (std::size_t b = 0; b < x.dim(0); ++b) {
        double* row = x.data().data() + b * block;
        for (std::size_t i = 0; i < block; ++i) {
            row[i] += pe[i];
        }
    }
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// tanh through expm1, which keeps full relative precision near zero.
inline double tanh(double v) {
    const double e = std::expm1(-2.0 * std::fabs(v));
    return std::copysign(-e / (2.0 + e), v);
}

/// Elementwise tanh. The output itself is what the backward pass needs.
inline Tensor tanh_forward(const Tensor& x) {
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = tanh(x[i]);
    }
    return y;
}

inline Tensor tanh_backward(const Tensor& dy, const Tensor& y) {
    dy.require_same_shape(y, "tanh backward");
    Tensor dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i) {
        dx[i] = dy[i] * (1.0 - y[i] * y[i]);
    }
    return dx;
}

/// Mean squared error and its gradient with respect to the predictions.
inline std::pair<double, Tensor> mse_loss(const Tensor& pred, const Tensor& target) {
    if (pred.size() != target.size()) {
        throw ShapeError("mse_loss: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(target.size()) + " targets");
    }
    if (pred.empty()) {
        throw ShapeError("mse_loss: empty batch");
    }
    const double n = static_cast<double>(pred.size());
    double loss = 0.0;
    Tensor grad(pred.shape());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - target[i];
        loss += r * r;
        grad[i] = 2.0 * r / n;
    }
    return {loss / n, std::move(grad)};
}

/// Mean over the time axis: [B,T,D] -> [B,D].
inline Tensor mean_over_time(const Tensor& x) {
    if (x.rank() != 3) {
        throw ShapeError("mean_over_time: expected rank 3, got " + shape_string(x.shape()));
    }
    const std::size_t batch = x.dim(0), steps = x.dim(1), width = x.dim(2);
    Tensor y({batch, width});
    const double inv = 1.0 / static_cast<double>(steps);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t d = 0; d < width; ++d) {
                y.at(b, d) += x.at(b, t, d);
            }
        }
        for (std::size_t d = 0; d < width; ++d) {
            y.at(b, d) *= inv;
        }
    }
    return y;
}

inline Tensor mean_over_time_backward(const Tensor& dy, std::size_t steps) {
    const std::size_t batch = dy.dim(0), width = dy.dim(1);
    Tensor dx({batch, steps, width});
    const double inv = 1.0 / static_cast<double>(steps);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t d = 0; d < width; ++d) {
                dx.at(b, t, d) = dy.at(b, d) * inv;
            }
        }
    }
    return dx;
}

} // namespace fttgru::nn
