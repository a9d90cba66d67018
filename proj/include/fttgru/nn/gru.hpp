#pragma once

// Single-layer GRU.
//
//   z  = sigmoid(x W_z + h U_z + b_z)
//   r  = sigmoid(x W_r + h U_r + b_r)
//   c  = tanh(x W_h + (r * h) U_h + b_h)
//   h' = (1 - z) * h + z * c
//
// Gate weights are stored fused with column blocks ordered (z, r, h):
// input_weight [I, 3U], hidden_weight [U, 3U], bias [3U].

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fttgru/nn/functional.hpp"
#include "fttgru/nn/parameter.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::nn {

struct GruCache {
    const void* owner = nullptr;
    Tensor input;    // [B, T, I]
    Tensor h_prev;   // [B, T, U], state entering each step
    Tensor update;   // z
    Tensor reset;    // r
    Tensor cand;     // c
};

struct GruOutput {
    Tensor all_h;  // [B, T, U]
    Tensor last_h; // [B, U]
};

struct GruGradients {
    Tensor dx;   // [B, T, I]
    Tensor dh0;  // [B, U]
};

class Gru {
public:
    Gru() = default;

    Gru(std::string name, std::size_t input, std::size_t units)
        : input_weight(name + ".input_weight", Tensor({input, 3 * units})),
          hidden_weight(name + ".hidden_weight", Tensor({units, 3 * units})),
          bias(name + ".bias", Tensor({3 * units})) {}

    std::size_t input_size() const { return input_weight.value.dim(0); }
    std::size_t units() const { return hidden_weight.value.dim(0); }

    void init(Rng& rng) {
        fill_uniform(input_weight.value, rng, xavier_limit(input_size(), units()));
        fill_uniform(hidden_weight.value, rng, std::sqrt(1.0 / static_cast<double>(units())));
        bias.value.fill(0.0);
    }

    /// Unrolls the cell over the time axis. An empty h0 means zeros.
    GruOutput forward(const Tensor& x, const Tensor& h0, GruCache& cache) const {
        check_input(x, h0);
        const std::size_t batch = x.dim(0), steps = x.dim(1), u = units();
        cache.owner = this;
        cache.input = x;
        cache.h_prev = Tensor({batch, steps, u});
        cache.update = Tensor({batch, steps, u});
        cache.reset = Tensor({batch, steps, u});
        cache.cand = Tensor({batch, steps, u});
        GruOutput out{Tensor({batch, steps, u}), h0.empty() ? Tensor({batch, u}) : h0};
        run(x, out, &cache);
        return out;
    }

    GruOutput apply(const Tensor& x, const Tensor& h0 = {}) const {
        check_input(x, h0);
        GruOutput out{Tensor({x.dim(0), x.dim(1), units()}), h0.empty() ? Tensor({x.dim(0), units()}) : h0};
        run(x, out, nullptr);
        return out;
    }

    /// Backprop through time. Either upstream gradient may be empty (zero).
    GruGradients backward(const Tensor& d_all_h, const Tensor& d_last_h, const GruCache& cache) {
        if (cache.owner != this) {
            throw ShapeError(bias.name + ": backward called with a cache from another layer");
        }
        const std::size_t batch = cache.input.dim(0), steps = cache.input.dim(1);
        const std::size_t in = input_size(), u = units(), g = 3 * u;
        if (!d_all_h.empty()) {
            d_all_h.require_shape({batch, steps, u}, bias.name + " backward (all_h)");
        }
        if (!d_last_h.empty()) {
            d_last_h.require_shape({batch, u}, bias.name + " backward (last_h)");
        }

        Tensor d_pre({batch, steps, g});  // gradients of gate pre-activations
        Tensor dh = d_last_h.empty() ? Tensor({batch, u}) : d_last_h;
        const double* wh = hidden_weight.value.data().data();
        // Transposed blocks of the hidden weight: [U_z U_r]^T as [2U, U] and U_h^T as [U, U].
        std::vector<double> wt_zr(2 * u * u), wt_h(u * u);
        for (std::size_t k = 0; k < u; ++k) {
            for (std::size_t j = 0; j < 2 * u; ++j) {
                wt_zr[j * u + k] = wh[k * g + j];
            }
            for (std::size_t j = 0; j < u; ++j) {
                wt_h[j * u + k] = wh[k * g + 2 * u + j];
            }
        }
        std::vector<double> d_rh(batch * u), rh(batch * steps * u);
        const std::size_t stride = steps * g;  // between batch rows of d_pre at a fixed step

        for (std::size_t step = steps; step-- > 0;) {
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t row = (b * steps + step) * u;
                const double* hp = cache.h_prev.data().data() + row;
                const double* z = cache.update.data().data() + row;
                const double* c = cache.cand.data().data() + row;
                double* dhb = dh.data().data() + b * u;
                if (!d_all_h.empty()) {
                    const double* up = d_all_h.data().data() + row;
                    for (std::size_t j = 0; j < u; ++j) {
                        dhb[j] += up[j];
                    }
                }
                double* da = d_pre.data().data() + (b * steps + step) * g;
                for (std::size_t j = 0; j < u; ++j) {
                    const double dz = dhb[j] * (c[j] - hp[j]);
                    const double dc = dhb[j] * z[j];
                    da[j] = dz * z[j] * (1.0 - z[j]);
                    da[2 * u + j] = dc * (1.0 - c[j] * c[j]);
                }
            }
            // d(r*h) = da_h U_h^T
            std::fill(d_rh.begin(), d_rh.end(), 0.0);
            kernels::detail::gemm_tiled(d_pre.data().data() + step * g + 2 * u, stride, 1, wt_h.data(), u, d_rh.data(),
                                        u, batch, u, u);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t row = (b * steps + step) * u;
                const double* hp = cache.h_prev.data().data() + row;
                const double* z = cache.update.data().data() + row;
                const double* r = cache.reset.data().data() + row;
                double* da = d_pre.data().data() + (b * steps + step) * g;
                double* dhb = dh.data().data() + b * u;
                const double* drh = d_rh.data() + b * u;
                for (std::size_t j = 0; j < u; ++j) {
                    da[u + j] = drh[j] * hp[j] * r[j] * (1.0 - r[j]);
                    dhb[j] = dhb[j] * (1.0 - z[j]) + drh[j] * r[j];
                    rh[row + j] = r[j] * hp[j];
                }
            }
            // Gradient flowing into h_prev through the z and r gates.
            kernels::detail::gemm_tiled(d_pre.data().data() + step * g, stride, 1, wt_zr.data(), u,
                                        dh.data().data(), u, batch, 2 * u, u);
        }

        // Hidden weight gradients: h_prev^T [da_z, da_r] and (r*h_prev)^T da_h over all rows.
        double* dwh = hidden_weight.grad.data().data();
        kernels::detail::gemm_tiled(cache.h_prev.data().data(), 1, u, d_pre.data().data(), g, dwh, g, u,
                                    batch * steps, 2 * u);
        kernels::detail::gemm_tiled(rh.data(), 1, u, d_pre.data().data() + 2 * u, g, dwh + 2 * u, g, u,
                                    batch * steps, u);

        const std::size_t rows = batch * steps;
        kernels::gemm_at_b(cache.input.data().data(), d_pre.data().data(), input_weight.grad.data().data(), rows,
                           in, g);
        double* db = bias.grad.data().data();
        for (std::size_t i = 0; i < rows; ++i) {
            const double* da = d_pre.data().data() + i * g;
            for (std::size_t j = 0; j < g; ++j) {
                db[j] += da[j];
            }
        }
        GruGradients grads{Tensor({batch, steps, in}), std::move(dh)};
        kernels::gemm_a_bt(d_pre.data().data(), input_weight.value.data().data(), grads.dx.data().data(), rows, g,
                           in, false);
        return grads;
    }

    void collect(ParameterRefs& out) {
        out.push_back(&input_weight);
        out.push_back(&hidden_weight);
        out.push_back(&bias);
    }

    Parameter input_weight;
    Parameter hidden_weight;
    Parameter bias;

private:
    void check_input(const Tensor& x, const Tensor& h0) const {
        if (x.rank() != 3 || x.dim(2) != input_size()) {
            throw ShapeError(bias.name + ": expected [B,T," + std::to_string(input_size()) + "], got " +
                             shape_string(x.shape()));
        }
        if (!h0.empty()) {
            h0.require_shape({x.dim(0), units()}, bias.name + " initial state");
        }
    }

    void run(const Tensor& x, GruOutput& out, GruCache* cache) const {
        const std::size_t batch = x.dim(0), steps = x.dim(1), in = input_size(), u = units(), g = 3 * u;
        // Input contributions for every step in one pass: [B*T, 3U].
        std::vector<double> pre(batch * steps * g);
        for (std::size_t i = 0; i < batch * steps; ++i) {
            std::copy(bias.value.data().begin(), bias.value.data().end(), pre.begin() + i * g);
        }
        kernels::gemm(x.data().data(), input_weight.value.data().data(), pre.data(), batch * steps, in, g, true);

        const double* wh = hidden_weight.value.data().data();
        double* h = out.last_h.data().data();
        std::vector<double> acc(batch * g), rh(batch * u);
        for (std::size_t step = 0; step < steps; ++step) {
            for (std::size_t b = 0; b < batch; ++b) {
                const double* xp = pre.data() + (b * steps + step) * g;
                std::copy(xp, xp + g, acc.begin() + b * g);
            }
            kernels::detail::gemm_tiled(h, u, 1, wh, g, acc.data(), g, batch, u, 2 * u);
            for (std::size_t b = 0; b < batch; ++b) {
                double* ab = acc.data() + b * g;
                const double* hb = h + b * u;
                for (std::size_t j = 0; j < u; ++j) {
                    ab[j] = sigmoid(ab[j]);
                    ab[u + j] = sigmoid(ab[u + j]);
                    rh[b * u + j] = ab[u + j] * hb[j];
                }
            }
            kernels::detail::gemm_tiled(rh.data(), u, 1, wh + 2 * u, g, acc.data() + 2 * u, g, batch, u, u);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t row = (b * steps + step) * u;
                const double* ab = acc.data() + b * g;
                double* hb = h + b * u;
                if (cache) {
                    std::copy(hb, hb + u, cache->h_prev.data().data() + row);
                    std::copy(ab, ab + u, cache->update.data().data() + row);
                    std::copy(ab + u, ab + 2 * u, cache->reset.data().data() + row);
                }
                double* hs = out.all_h.data().data() + row;
                for (std::size_t j = 0; j < u; ++j) {
                    const double c = tanh(ab[2 * u + j]);
                    if (cache) {
                        cache->cand.data()[row + j] = c;
                    }
                    hb[j] = (1.0 - ab[j]) * hb[j] + ab[j] * c;
                    hs[j] = hb[j];
                }
            }
        }
    }
};

/// One GRU step: x_t [B,I], h_prev [B,U] -> h_t [B,U].
inline Tensor gru_cell(const Gru& gru, const Tensor& x_t, const Tensor& h_prev, GruCache& cache) {
    if (x_t.rank() != 2) {
        throw ShapeError("gru_cell: expected [B,I], got " + shape_string(x_t.shape()));
    }
    const Tensor x = x_t.reshaped({x_t.dim(0), 1, x_t.dim(1)});
    return gru.forward(x, h_prev, cache).last_h;
}

} // namespace fttgru::nn
