#pragma once

#include <cstddef>
#include <string>

#include "fttgru/nn/parameter.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::nn {

struct DenseCache {
    const void* owner = nullptr;
    Tensor input;
};

/// Affine map over the last axis: y = x W + b. Leading axes are treated as rows.
class Dense {
public:
    Dense() = default;

    Dense(std::string name, std::size_t in, std::size_t out)
        : weight(name + ".weight", Tensor({in, out})), bias(name + ".bias", Tensor({out})) {}

    void init(Rng& rng) {
        fill_uniform(weight.value, rng, xavier_limit(in_features(), out_features()));
        bias.value.fill(0.0);
    }

    std::size_t in_features() const { return weight.value.dim(0); }
    std::size_t out_features() const { return weight.value.dim(1); }

    Tensor forward(const Tensor& x, DenseCache& cache) const {
        check_input(x);
        cache.owner = this;
        cache.input = x;
        return apply(x);
    }

    /// Inference path that keeps no cache.
    Tensor apply(const Tensor& x) const {
        check_input(x);
        const std::size_t rows = leading_rows(x);
        const std::size_t in = in_features();
        const std::size_t out = out_features();
        Shape shape = x.shape();
        shape.back() = out;
        Tensor y(shape);
        double* py = y.data().data();
        const double* pb = bias.value.data().data();
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy(pb, pb + out, py + r * out);
        }
        kernels::gemm(x.data().data(), weight.value.data().data(), py, rows, in, out, true);
        return y;
    }

    Tensor backward(const Tensor& dy, const DenseCache& cache) {
        if (cache.owner != this) {
            throw ShapeError(weight.name + ": backward called with a cache from another layer");
        }
        Shape expected = cache.input.shape();
        expected.back() = out_features();
        dy.require_shape(expected, weight.name + " backward");
        const std::size_t rows = leading_rows(dy);
        const std::size_t in = in_features();
        const std::size_t out = out_features();
        kernels::gemm_at_b(cache.input.data().data(), dy.data().data(), weight.grad.data().data(), rows,
                           in, out);
        double* db = bias.grad.data().data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* row = dy.data().data() + r * out;
            for (std::size_t j = 0; j < out; ++j) {
                db[j] += row[j];
            }
        }
        Tensor dx(cache.input.shape());
        kernels::gemm_a_bt(dy.data().data(), weight.value.data().data(), dx.data().data(), rows, out, in,
                           false);
        return dx;
    }

    void collect(ParameterRefs& out) {
        out.push_back(&weight);
        out.push_back(&bias);
    }

    Parameter weight;
    Parameter bias;

private:
    void check_input(const Tensor& x) const {
        if (x.rank() == 0 || x.shape().back() != in_features()) {
            throw ShapeError(weight.name + ": expected last axis " + std::to_string(in_features()) +
                             ", got shape " + shape_string(x.shape()));
        }
    }
};

} // namespace fttgru::nn
