#pragma once

#include <string>

#include "fttgru/nn/dense.hpp"
#include "fttgru/nn/fourier_mix.hpp"
#include "fttgru/nn/functional.hpp"
#include "fttgru/nn/layer_norm.hpp"

namespace fttgru::model {

struct EncoderCache {
    nn::LayerNormCache norm1;
    nn::FourierMixCache mix;
    nn::LayerNormCache norm2;
    nn::DenseCache ffn_in;
    Tensor ffn_act;
    nn::DenseCache ffn_out;
};

/// Pre-norm encoder block:
///   h = x + Mix(LN1(x));  y = h + W2 tanh(W1 LN2(h))
class EncoderLayer {
public:
    EncoderLayer() = default;

    EncoderLayer(const std::string& name, std::size_t steps, std::size_t width, std::size_t heads,
                 std::size_t ffn_width, nn::MixMode mode)
        : norm1(name + ".norm1", width), mix(name + ".mix", steps, width, heads, mode),
          norm2(name + ".norm2", width), ffn_in(name + ".ffn_in", width, ffn_width),
          ffn_out(name + ".ffn_out", ffn_width, width) {}

    void init(Rng& rng) {
        mix.init(rng);
        ffn_in.init(rng);
        ffn_out.init(rng);
    }

    Tensor forward(const Tensor& x, EncoderCache& cache) const {
        Tensor h = x + mix.forward(norm1.forward(x, cache.norm1), cache.mix);
        cache.ffn_act = nn::tanh_forward(ffn_in.forward(norm2.forward(h, cache.norm2), cache.ffn_in));
        h += ffn_out.forward(cache.ffn_act, cache.ffn_out);
        return h;
    }

    Tensor apply(const Tensor& x) const {
        Tensor h = x + mix.apply(norm1.apply(x));
        h += ffn_out.apply(nn::tanh_forward(ffn_in.apply(norm2.apply(h))));
        return h;
    }

    Tensor backward(const Tensor& dy, EncoderCache& cache) {
        Tensor dh = dy;
        const Tensor d_act = ffn_out.backward(dy, cache.ffn_out);
        const Tensor d_pre = nn::tanh_backward(d_act, cache.ffn_act);
        dh += norm2.backward(ffn_in.backward(d_pre, cache.ffn_in), cache.norm2);
        Tensor dx = dh;
        dx += norm1.backward(mix.backward(dh, cache.mix), cache.norm1);
        return dx;
    }

    void collect(nn::ParameterRefs& out) {
        norm1.collect(out);
        mix.collect(out);
        norm2.collect(out);
        ffn_in.collect(out);
        ffn_out.collect(out);
    }

    nn::LayerNorm norm1;
    nn::FourierMix mix;
    nn::LayerNorm norm2;
    nn::Dense ffn_in;
    nn::Dense ffn_out;
};

} // namespace fttgru::model
