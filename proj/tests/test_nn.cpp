#include <catch2/catch_amalgamated.hpp>

#include "fttgru/nn/dense.hpp"
#include "fttgru/nn/fourier_mix.hpp"
#include "fttgru/nn/functional.hpp"
#include "fttgru/nn/gru.hpp"
#include "fttgru/nn/layer_norm.hpp"
#include "support.hpp"

using namespace fttgru;
using namespace fttgru::nn;
using testing::central_difference;
using testing::random_tensor;
using testing::rel_err;
using testing::weighted_sum;

namespace {

/// Checks every entry of `slots` against central differences of `loss`.
double worst_rel_err(Tensor& slots, const Tensor& analytic, const std::function<double()>& loss) {
    double worst = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double numeric = central_difference(&slots.data()[i], loss);
        worst = std::max(worst, rel_err(analytic[i], numeric));
    }
    return worst;
}

double sigmoid_ref(double v) { return 1.0 / (1.0 + std::exp(-v)); }

} // namespace

TEST_CASE("dense forward", "[nn][dense]") {
    Rng rng(1);
    Dense layer("d", 3, 3);
    const Tensor x = random_tensor({4, 3}, rng);
    DenseCache cache;

    SECTION("identity weights pass the input through") {
        for (std::size_t i = 0; i < 3; ++i) layer.weight.value.at(i, i) = 1.0;
        CHECK(layer.forward(x, cache) == x);
    }
    SECTION("zero weights broadcast the bias") {
        layer.bias.value = Tensor({3}, {0.5, -1.0, 2.0});
        const Tensor y = layer.forward(x, cache);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t j = 0; j < 3; ++j) CHECK(y.at(r, j) == layer.bias.value[j]);
    }
    SECTION("random case matches matmul plus broadcast") {
        Dense d("d", 3, 5);
        d.init(rng);
        fill_uniform(d.bias.value, rng, 1.0);
        const Tensor y = d.forward(x, cache);
        Tensor expected = testing::naive_matmul(x, d.weight.value);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t j = 0; j < 5; ++j) expected.at(r, j) += d.bias.value[j];
        CHECK(testing::max_abs_diff(y.data(), expected.data()) < 1e-14);
    }
    SECTION("wrong feature width") {
        CHECK_THROWS_AS(layer.forward(Tensor({2, 4}), cache), ShapeError);
    }
}

TEST_CASE("dense backward", "[nn][dense][gradient]") {
    Rng rng(2);
    SECTION("zero upstream gradient") {
        Dense d("d", 3, 2);
        d.init(rng);
        DenseCache cache;
        d.forward(random_tensor({2, 3}, rng), cache);
        const Tensor dx = d.backward(Tensor({2, 2}), cache);
        for (double v : dx.data()) CHECK(v == 0.0);
        for (double v : d.weight.grad.data()) CHECK(v == 0.0);
        for (double v : d.bias.grad.data()) CHECK(v == 0.0);
    }
    SECTION("scalar chain rule") {
        Dense d("d", 1, 1);
        d.weight.value[0] = 0.7;
        DenseCache cache;
        d.forward(Tensor({1, 1}, {2.0}), cache);
        const Tensor dx = d.backward(Tensor({1, 1}, {3.0}), cache);
        CHECK(dx[0] == Catch::Approx(2.1));
        CHECK(d.weight.grad[0] == Catch::Approx(6.0));
        CHECK(d.bias.grad[0] == Catch::Approx(3.0));
    }
    SECTION("finite differences of sum(y) on a rank-3 input") {
        Dense d("d", 4, 3);
        d.init(rng);
        fill_uniform(d.bias.value, rng, 0.5);
        Tensor x = random_tensor({2, 5, 4}, rng);
        DenseCache cache;
        const Tensor y = d.forward(x, cache);
        const Tensor ones(y.shape(), 1.0);
        const Tensor dx = d.backward(ones, cache);
        auto loss = [&] { return weighted_sum(d.apply(x), ones); };
        CHECK(worst_rel_err(x, dx, loss) < 1e-6);
        CHECK(worst_rel_err(d.weight.value, d.weight.grad, loss) < 1e-6);
        CHECK(worst_rel_err(d.bias.value, d.bias.grad, loss) < 1e-6);
    }
    SECTION("cache from another layer is rejected") {
        Dense a("a", 2, 2), b("b", 2, 2);
        DenseCache cache;
        a.forward(Tensor({1, 2}), cache);
        CHECK_THROWS_AS(b.backward(Tensor({1, 2}), cache), ShapeError);
        CHECK_THROWS_AS(a.backward(Tensor({3, 2}), cache), ShapeError);
    }
}

TEST_CASE("layer norm", "[nn][layernorm]") {
    Rng rng(3);
    SECTION("constant row maps to zero") {
        LayerNorm ln("ln", 4);
        LayerNormCache cache;
        const Tensor y = ln.forward(Tensor({1, 4}, 3.0), cache);
        for (double v : y.data()) CHECK(v == 0.0);
    }
    SECTION("already standardised row is unchanged") {
        LayerNorm ln("ln", 2);
        LayerNormCache cache;
        const Tensor y = ln.forward(Tensor({1, 2}, {1.0, -1.0}), cache);
        CHECK(y[0] == Catch::Approx(1.0).epsilon(1e-5));
        CHECK(y[1] == Catch::Approx(-1.0).epsilon(1e-5));
    }
    SECTION("random rows match the direct formula") {
        LayerNorm ln("ln", 6);
        fill_uniform(ln.gamma.value, rng, 2.0);
        fill_uniform(ln.beta.value, rng, 1.0);
        const Tensor x = random_tensor({2, 3, 6}, rng, -3, 3);
        LayerNormCache cache;
        const Tensor y = ln.forward(x, cache);
        for (std::size_t r = 0; r < 6; ++r) {
            double mean = 0, var = 0;
            for (std::size_t j = 0; j < 6; ++j) mean += x[r * 6 + j] / 6.0;
            for (std::size_t j = 0; j < 6; ++j) var += (x[r * 6 + j] - mean) * (x[r * 6 + j] - mean) / 6.0;
            for (std::size_t j = 0; j < 6; ++j) {
                const double expected =
                    ln.gamma.value[j] * (x[r * 6 + j] - mean) / std::sqrt(var + 1e-5) + ln.beta.value[j];
                CHECK(std::abs(y[r * 6 + j] - expected) < 1e-12);
            }
        }
    }
    SECTION("non-positive eps is rejected") {
        CHECK_THROWS_AS(LayerNorm("ln", 3, 0.0), ConfigError);
    }
}

TEST_CASE("layer norm backward", "[nn][layernorm][gradient]") {
    Rng rng(4);
    SECTION("zero upstream gradient") {
        LayerNorm ln("ln", 5);
        LayerNormCache cache;
        ln.forward(random_tensor({3, 5}, rng), cache);
        for (double v : testing::values(ln.backward(Tensor({3, 5}), cache))) CHECK(v == 0.0);
    }
    SECTION("width one has no input gradient") {
        LayerNorm ln("ln", 1);
        LayerNormCache cache;
        ln.forward(random_tensor({4, 1}, rng), cache);
        for (double v : testing::values(ln.backward(random_tensor({4, 1}, rng), cache))) CHECK(v == 0.0);
    }
    SECTION("finite differences") {
        LayerNorm ln("ln", 5);
        fill_uniform(ln.gamma.value, rng, 2.0);
        fill_uniform(ln.beta.value, rng, 1.0);
        Tensor x = random_tensor({2, 3, 5}, rng, -2, 2);
        const Tensor w = random_tensor({2, 3, 5}, rng);
        LayerNormCache cache;
        ln.forward(x, cache);
        const Tensor dx = ln.backward(w, cache);
        auto loss = [&] {
            LayerNormCache c;
            return weighted_sum(ln.forward(x, c), w);
        };
        CHECK(worst_rel_err(x, dx, loss) < 1e-6);
        CHECK(worst_rel_err(ln.gamma.value, ln.gamma.grad, loss) < 1e-6);
        CHECK(worst_rel_err(ln.beta.value, ln.beta.grad, loss) < 1e-6);
    }
}

TEST_CASE("positional encoding", "[nn]") {
    const Tensor pe = positional_encoding(30, 64);
    for (std::size_t i = 0; i < 64; ++i) CHECK(pe.at(0, i) == (i % 2 == 0 ? 0.0 : 1.0));
    CHECK(pe.at(1, 0) == Catch::Approx(0.841470984807897));
    CHECK(pe.at(1, 1) == Catch::Approx(std::cos(1.0)));
    // Dimension pair i = 5 at t = 7: 7 / 10000^(10/64).
    CHECK(pe.at(7, 10) == Catch::Approx(std::sin(7.0 / std::pow(10000.0, 10.0 / 64.0))));
    for (double v : pe.data()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(positional_encoding(30, 63), ShapeError);
}

namespace {

/// Naive spectral filter for one channel: DFT, multiply the first N/2+1 bins by
/// g and mirror conj(g) on the rest, inverse DFT, real part.
std::vector<double> naive_filter(const std::vector<double>& x, const std::vector<cplx>& g) {
    const std::size_t n = x.size();
    auto spec = testing::naive_dft(std::vector<cplx>(x.begin(), x.end()));
    for (std::size_t k = 0; k < n; ++k) {
        cplx gk = k < g.size() ? g[k] : std::conj(g[n - k]);
        if (k == 0 || (n % 2 == 0 && k == n / 2)) gk = g[k].real();
        spec[k] *= gk;
    }
    const auto back = testing::naive_dft(spec, +1);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = back[i].real() / static_cast<double>(n);
    return out;
}

void identity_projection(FourierMix& mix, std::size_t width) {
    mix.projection.weight.value.fill(0.0);
    for (std::size_t i = 0; i < width; ++i) mix.projection.weight.value.at(i, i) = 1.0;
    mix.projection.bias.value.fill(0.0);
}

} // namespace

TEST_CASE("fourier mixing forward", "[nn][fourier]") {
    Rng rng(5);
    const std::size_t batch = 2, steps = 30, width = 8, heads = 4;
    FourierMix mix("mix", steps, width, heads, MixMode::spectral);
    mix.init(rng);
    REQUIRE(mix.bins() == 16);
    const Tensor x = random_tensor({batch, steps, width}, rng);

    SECTION("unit filters are the identity before projection") {
        CHECK(testing::max_abs_diff(mix.mix(x).data(), x.data()) < 1e-12);
    }
    SECTION("zero filters give zero before projection") {
        mix.filters.value.fill(0.0);
        for (double v : testing::values(mix.mix(x))) CHECK(std::abs(v) < 1e-15);
    }
    SECTION("random filters match the naive spectral oracle") {
        fill_uniform(mix.filters.value, rng, 1.5);
        const Tensor y = mix.mix(x);
        double worst = 0;
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t c = 0; c < width; ++c) {
                std::vector<double> col(steps);
                for (std::size_t t = 0; t < steps; ++t) col[t] = x.at(b, t, c);
                std::vector<cplx> g(mix.bins());
                for (std::size_t k = 0; k < g.size(); ++k) g[k] = mix.filter(c / (width / heads), k);
                const auto expected = naive_filter(col, g);
                for (std::size_t t = 0; t < steps; ++t) worst = std::max(worst, std::abs(y.at(b, t, c) - expected[t]));
            }
        CHECK(worst < 1e-9);
    }
    SECTION("unit filters with identity projection are the identity map") {
        identity_projection(mix, width);
        CHECK(testing::max_abs_diff(mix.apply(x).data(), x.data()) < 1e-10);
    }
    SECTION("width must divide into heads") {
        CHECK_THROWS_AS(FourierMix("bad", steps, 10, 4, MixMode::spectral), ShapeError);
    }
}

TEST_CASE("fnet mode takes the real part of the full transform", "[nn][fourier]") {
    Rng rng(6);
    FourierMix mix("mix", 7, 3, 1, MixMode::fnet);
    mix.init(rng);
    const Tensor x = random_tensor({1, 7, 3}, rng);
    const Tensor y = mix.mix(x);
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<cplx> col(7);
        for (std::size_t t = 0; t < 7; ++t) col[t] = x.at(0, t, c);
        const auto spec = testing::naive_dft(col);
        for (std::size_t t = 0; t < 7; ++t) CHECK(std::abs(y.at(0, t, c) - spec[t].real()) < 1e-12);
    }
    nn::ParameterRefs refs;
    mix.collect(refs);
    CHECK(refs.size() == 2);  // projection only
}

TEST_CASE("fourier mixing backward", "[nn][fourier][gradient]") {
    Rng rng(7);
    SECTION("zero upstream gradient") {
        FourierMix mix("mix", 30, 8, 4, MixMode::spectral);
        mix.init(rng);
        FourierMixCache cache;
        mix.forward(random_tensor({2, 30, 8}, rng), cache);
        for (double v : testing::values(mix.backward(Tensor({2, 30, 8}), cache))) CHECK(v == 0.0);
        for (double v : mix.filters.grad.data()) CHECK(v == 0.0);
        for (double v : mix.projection.weight.grad.data()) CHECK(v == 0.0);
    }
    SECTION("unit filters and identity projection pass the gradient through") {
        FourierMix mix("mix", 30, 8, 4, MixMode::spectral);
        identity_projection(mix, 8);
        FourierMixCache cache;
        mix.forward(random_tensor({2, 30, 8}, rng), cache);
        const Tensor dy = random_tensor({2, 30, 8}, rng);
        CHECK(testing::max_abs_diff(mix.backward(dy, cache).data(), dy.data()) < 1e-12);
    }
    for (const std::size_t steps : {30u, 9u}) {
        for (const MixMode mode : {MixMode::spectral, MixMode::fnet}) {
            DYNAMIC_SECTION("finite differences, T=" << steps << " mode=" << static_cast<int>(mode)) {
                FourierMix mix("mix", steps, 6, 3, mode);
                mix.init(rng);
                if (mode == MixMode::spectral) fill_uniform(mix.filters.value, rng, 1.5);
                Tensor x = random_tensor({2, steps, 6}, rng);
                const Tensor w = random_tensor({2, steps, 6}, rng);
                FourierMixCache cache;
                mix.forward(x, cache);
                const Tensor dx = mix.backward(w, cache);
                auto loss = [&] { return weighted_sum(mix.apply(x), w); };
                CHECK(worst_rel_err(x, dx, loss) < 1e-5);
                CHECK(worst_rel_err(mix.projection.weight.value, mix.projection.weight.grad, loss) < 1e-5);
                if (mode == MixMode::spectral) {
                    CHECK(worst_rel_err(mix.filters.value, mix.filters.grad, loss) < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("gru cell", "[nn][gru]") {
    SECTION("zero parameters, unit state") {
        Gru gru("g", 2, 3);
        GruCache cache;
        const Tensor h = gru_cell(gru, Tensor({1, 2}, 0.7), Tensor({1, 3}, 1.0), cache);
        for (double v : h.data()) CHECK(v == 0.5);
        for (double v : cache.update.data()) CHECK(v == 0.5);
        for (double v : cache.reset.data()) CHECK(v == 0.5);
        for (double v : cache.cand.data()) CHECK(v == 0.0);
    }
    SECTION("zero parameters, zero state") {
        Gru gru("g", 2, 3);
        GruCache cache;
        for (double v : testing::values(gru_cell(gru, Tensor({2, 2}, -1.0), Tensor({2, 3}), cache))) CHECK(v == 0.0);
    }
    SECTION("scalar case against the gate formulas") {
        Gru gru("g", 1, 1);
        // (z, r, h) blocks
        gru.input_weight.value = Tensor({1, 3}, {0.3, -0.4, 0.9});
        gru.hidden_weight.value = Tensor({1, 3}, {-0.2, 0.6, 0.5});
        gru.bias.value = Tensor({3}, {0.1, 0.05, -0.3});
        const double x = 0.8, h = -0.6;
        const double z = sigmoid_ref(0.3 * x - 0.2 * h + 0.1);
        const double r = sigmoid_ref(-0.4 * x + 0.6 * h + 0.05);
        const double c = std::tanh(0.9 * x + 0.5 * (r * h) - 0.3);
        const double expected = (1 - z) * h + z * c;
        GruCache cache;
        CHECK(gru_cell(gru, Tensor({1, 1}, {x}), Tensor({1, 1}, {h}), cache)[0] ==
              Catch::Approx(expected).epsilon(1e-14));
    }
    SECTION("shape mismatch") {
        Gru gru("g", 2, 3);
        GruCache cache;
        CHECK_THROWS_AS(gru_cell(gru, Tensor({1, 3}), Tensor({1, 3}), cache), ShapeError);
        CHECK_THROWS_AS(gru_cell(gru, Tensor({1, 2}), Tensor({1, 2}), cache), ShapeError);
    }
}

TEST_CASE("gru sequence", "[nn][gru]") {
    Rng rng(8);
    SECTION("zero parameters halve the state every step") {
        Gru gru("g", 2, 2);
        GruCache cache;
        const auto out = gru.forward(random_tensor({1, 4, 2}, rng), Tensor({1, 2}, {1.0, -2.0}), cache);
        for (std::size_t t = 0; t < 4; ++t) {
            const double f = std::pow(0.5, static_cast<double>(t + 1));
            CHECK(out.all_h.at(0, t, 0) == f);
            CHECK(out.all_h.at(0, t, 1) == -2.0 * f);
        }
    }
    SECTION("T=1 equals one cell step and the last state equals the final row") {
        Gru gru("g", 3, 4);
        gru.init(rng);
        const Tensor x = random_tensor({2, 1, 3}, rng);
        const Tensor h0 = random_tensor({2, 4}, rng);
        GruCache a, b;
        const auto seq = gru.forward(x, h0, a);
        const Tensor cell = gru_cell(gru, x.reshaped({2, 3}), h0, b);
        CHECK(seq.last_h == cell);
        CHECK(testing::max_abs_diff(seq.all_h.data(), cell.data()) == 0.0);
    }
    SECTION("T=3 matches a manual scalar unroll") {
        const std::size_t in = 2, u = 3, steps = 3;
        Gru gru("g", in, u);
        gru.init(rng);
        fill_uniform(gru.bias.value, rng, 0.5);
        const Tensor x = random_tensor({1, steps, in}, rng);
        GruCache cache;
        const auto out = gru.forward(x, Tensor{}, cache);
        const Tensor& wx = gru.input_weight.value;
        const Tensor& wh = gru.hidden_weight.value;
        const Tensor& bias = gru.bias.value;
        std::vector<double> h(u, 0.0);
        for (std::size_t t = 0; t < steps; ++t) {
            std::vector<double> z(u), r(u), hn(u);
            for (std::size_t j = 0; j < u; ++j) {
                double az = bias[j], ar = bias[u + j];
                for (std::size_t i = 0; i < in; ++i) {
                    az += x.at(0, t, i) * wx.at(i, j);
                    ar += x.at(0, t, i) * wx.at(i, u + j);
                }
                for (std::size_t k = 0; k < u; ++k) {
                    az += h[k] * wh.at(k, j);
                    ar += h[k] * wh.at(k, u + j);
                }
                z[j] = sigmoid_ref(az);
                r[j] = sigmoid_ref(ar);
            }
            for (std::size_t j = 0; j < u; ++j) {
                double ac = bias[2 * u + j];
                for (std::size_t i = 0; i < in; ++i) ac += x.at(0, t, i) * wx.at(i, 2 * u + j);
                for (std::size_t k = 0; k < u; ++k) ac += r[k] * h[k] * wh.at(k, 2 * u + j);
                hn[j] = (1 - z[j]) * h[j] + z[j] * std::tanh(ac);
            }
            h = hn;
            for (std::size_t j = 0; j < u; ++j) CHECK(std::abs(out.all_h.at(0, t, j) - h[j]) < 1e-14);
        }
    }
    SECTION("state stays bounded by max(|h_prev|, 1)") {
        Gru gru("g", 3, 5);
        for (int trial = 0; trial < 50; ++trial) {
            fill_uniform(gru.input_weight.value, rng, 3.0);
            fill_uniform(gru.hidden_weight.value, rng, 3.0);
            fill_uniform(gru.bias.value, rng, 3.0);
            const Tensor h0 = random_tensor({4, 5}, rng, -4, 4);
            GruCache cache;
            const Tensor h1 = gru_cell(gru, random_tensor({4, 3}, rng, -5, 5), h0, cache);
            for (std::size_t i = 0; i < h1.size(); ++i) CHECK(std::abs(h1[i]) <= std::max(std::abs(h0[i]), 1.0));
        }
    }
}

TEST_CASE("gru backward", "[nn][gru][gradient]") {
    Rng rng(9);
    SECTION("zero upstream gradients") {
        Gru gru("g", 2, 3);
        gru.init(rng);
        GruCache cache;
        gru.forward(random_tensor({2, 3, 2}, rng), Tensor{}, cache);
        const auto grads = gru.backward(Tensor({2, 3, 3}), Tensor({2, 3}), cache);
        for (double v : grads.dx.data()) CHECK(v == 0.0);
        for (double v : grads.dh0.data()) CHECK(v == 0.0);
        for (double v : gru.hidden_weight.grad.data()) CHECK(v == 0.0);
    }
    SECTION("T=1 matches the single-step analytic gradient") {
        Gru gru("g", 1, 1);
        gru.input_weight.value = Tensor({1, 3}, {0.3, -0.4, 0.9});
        gru.hidden_weight.value = Tensor({1, 3}, {-0.2, 0.6, 0.5});
        const double x = 0.8, h = -0.6;
        GruCache cache;
        gru.forward(Tensor({1, 1, 1}, {x}), Tensor({1, 1}, {h}), cache);
        const auto grads = gru.backward(Tensor{}, Tensor({1, 1}, {1.0}), cache);
        // dh'/dx by the one-step chain rule.
        const double z = sigmoid_ref(0.3 * x - 0.2 * h);
        const double r = sigmoid_ref(-0.4 * x + 0.6 * h);
        const double c = std::tanh(0.9 * x + 0.5 * r * h);
        const double dr_dx = r * (1 - r) * -0.4;
        const double dc_dx = (1 - c * c) * (0.9 + 0.5 * h * dr_dx);
        const double dz_dx = z * (1 - z) * 0.3;
        const double expected = dz_dx * (c - h) + z * dc_dx;
        CHECK(grads.dx[0] == Catch::Approx(expected).epsilon(1e-12));
    }
    SECTION("B=2 T=3 I=2 U=3 finite differences") {
        Gru gru("g", 2, 3);
        gru.init(rng);
        fill_uniform(gru.bias.value, rng, 0.5);
        Tensor x = random_tensor({2, 3, 2}, rng);
        Tensor h0 = random_tensor({2, 3}, rng);
        const Tensor w_all = random_tensor({2, 3, 3}, rng);
        const Tensor w_last = random_tensor({2, 3}, rng);
        GruCache cache;
        gru.forward(x, h0, cache);
        const auto grads = gru.backward(w_all, w_last, cache);
        auto loss = [&] {
            const auto out = gru.apply(x, h0);
            return weighted_sum(out.all_h, w_all) + weighted_sum(out.last_h, w_last);
        };
        CHECK(worst_rel_err(x, grads.dx, loss) < 1e-5);
        CHECK(worst_rel_err(h0, grads.dh0, loss) < 1e-5);
        CHECK(worst_rel_err(gru.input_weight.value, gru.input_weight.grad, loss) < 1e-5);
        CHECK(worst_rel_err(gru.hidden_weight.value, gru.hidden_weight.grad, loss) < 1e-5);
        CHECK(worst_rel_err(gru.bias.value, gru.bias.grad, loss) < 1e-5);
    }
}

TEST_CASE("mse loss", "[nn][loss]") {
    const Tensor a({3}, {1.0, 2.0, 3.0});
    auto [zero, g0] = mse_loss(a, a);
    CHECK(zero == 0.0);
    for (double v : g0.data()) CHECK(v == 0.0);

    auto [one, g1] = mse_loss(Tensor({2}, {1.0, -1.0}), Tensor({2}, {0.0, 0.0}));
    CHECK(one == 1.0);
    CHECK(g1[0] == 1.0);
    CHECK(g1[1] == -1.0);

    Rng rng(10);
    Tensor pred = random_tensor({6}, rng, -5, 5);
    const Tensor target = random_tensor({6}, rng, -5, 5);
    const Tensor grad = mse_loss(pred, target).second;
    for (std::size_t i = 0; i < 6; ++i) {
        const double numeric = central_difference(&pred.data()[i], [&] { return mse_loss(pred, target).first; });
        CHECK(rel_err(grad[i], numeric) < 1e-8);
    }

    CHECK_THROWS_AS(mse_loss(Tensor({2}), Tensor({3})), ShapeError);
    CHECK_THROWS_AS(mse_loss(Tensor{}, Tensor{}), ShapeError);
}

TEST_CASE("tanh agrees with the standard library", "[nn]") {
    for (double v = -25.0; v <= 25.0; v += 0.01) {
        const double expected = std::tanh(v);
        CHECK(std::abs(nn::tanh(v) - expected) <= 4e-16 * std::max(std::abs(expected), 1e-300));
    }
    for (double v : {0.0, 1e-300, -1e-300, 1e-12, -3e-9}) CHECK(nn::tanh(v) == Catch::Approx(std::tanh(v)).epsilon(1e-15));
    CHECK(std::signbit(nn::tanh(-0.0)));
    CHECK(nn::tanh(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(nn::tanh(-std::numeric_limits<double>::infinity()) == -1.0);
    CHECK(std::isnan(nn::tanh(std::nan(""))));
}
