#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fttgru/error.hpp"
#include "fttgru/nn/parameter.hpp"

namespace fttgru::training {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are created on the first step and
/// tied to the parameter list's order and shapes from then on.
class Adam {
public:
    explicit Adam(AdamConfig config = {}) : config_(config) {
        if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0) ||
            !(config.eps > 0.0)) {
            throw ConfigError("adam: betas must lie in [0, 1) and eps must be positive");
        }
    }

    std::size_t steps() const noexcept { return t_; }

    /// Applies one update with learning rate `lr`, then zeroes every gradient.
    /// Throws NumericError without touching any parameter if a gradient is not finite.
    void step(const nn::ParameterRefs& params, double lr) {
        for (const auto* p : params) {
            if (!p->grad.all_finite()) {
                throw NumericError("non-finite gradient in parameter '" + p->name + "'");
            }
        }
        if (m_.empty()) {
            for (const auto* p : params) {
                m_.emplace_back(p->value.size(), 0.0);
                v_.emplace_back(p->value.size(), 0.0);
            }
        }
        if (m_.size() != params.size()) {
            throw ShapeError("adam: parameter list changed between steps");
        }
        ++t_;
        const double b1 = config_.beta1, b2 = config_.beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            nn::Parameter& p = *params[i];
            if (m_[i].size() != p.value.size()) {
                throw ShapeError("adam: parameter '" + p.name + "' changed size");
            }
            double* w = p.value.data().data();
            double* g = p.grad.data().data();
            double* m = m_[i].data();
            double* v = v_[i].data();
            for (std::size_t j = 0; j < m_[i].size(); ++j) {
                m[j] = b1 * m[j] + (1.0 - b1) * g[j];
                v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
                const double m_hat = m[j] / c1;
                const double v_hat = v[j] / c2;
                w[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
                g[j] = 0.0;
            }
        }
    }

private:
    AdamConfig config_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

/// lr_min + (lr_max - lr_min) (1 + cos(pi step / total_steps)) / 2
inline double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min) {
    if (total_steps == 0) {
        throw ConfigError("cosine_lr: total_steps must be positive");
    }
    if (step > total_steps) {
        throw ConfigError("cosine_lr: step " + std::to_string(step) + " beyond total " +
                          std::to_string(total_steps));
    }
    const double phase = std::numbers::pi * static_cast<double>(step) / static_cast<double>(total_steps);
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase));
}

/// Index of the epoch that last improved on the running best by at least min_delta.
inline std::size_t best_epoch(const std::vector<double>& val, double min_delta) {
    if (val.empty()) {
        throw ShapeError("best_epoch: empty history");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < val.size(); ++i) {
        if (val[i] < val[best] - min_delta) {
            best = i;
        }
    }
    return best;
}

/// True once `patience` consecutive epochs (at least one) have failed to beat the
/// best validation MSE by min_delta.
inline bool early_stop_check(const std::vector<double>& val, std::size_t patience, double min_delta) {
    if (val.empty()) {
        throw ShapeError("early_stop_check: empty history");
    }
    const std::size_t stale = val.size() - 1 - best_epoch(val, min_delta);
    return stale > 0 && stale >= patience;
}

} // namespace fttgru::training
