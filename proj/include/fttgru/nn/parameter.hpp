#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fttgru/rng.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::nn {

/// A learnable tensor together with its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros_like(value)) {}

    void zero_grad() { grad.fill(0.0); }
    std::size_t size() const noexcept { return value.size(); }
};

/// Non-owning ordered view over a model's parameters.
using ParameterRefs = std::vector<Parameter*>;

inline void fill_uniform(Tensor& t, Rng& rng, double limit) {
    for (double& v : t.data()) {
        v = rng.uniform(-limit, limit);
    }
}

/// Glorot/Xavier uniform limit sqrt(6 / (fan_in + fan_out)).
inline double xavier_limit(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

} // namespace fttgru::nn
