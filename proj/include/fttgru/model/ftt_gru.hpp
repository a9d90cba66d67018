#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fttgru/model/config.hpp"
#include "fttgru/model/encoder.hpp"
#include "fttgru/nn/gru.hpp"
#include "fttgru/rng.hpp"

namespace fttgru::model {

/// Shape of one named intermediate, recorded by the instrumented forward pass.
struct ShapeTrace {
    std::string stage;
    Shape shape;
};

struct ModelCache {
    const void* owner = nullptr;
    std::size_t batch = 0;
    nn::DenseCache input;
    std::vector<EncoderCache> encoders;
    nn::GruCache gru;
    nn::DenseCache head;
    std::vector<ShapeTrace> trace;
};

/// Window regressor [B, seq_len, n_features] -> [B].
///
///   hybrid:   dense in -> +PE -> encoder x n_layers -> GRU -> last hidden -> dense head
///   gru_only: dense in -> GRU -> last hidden -> dense head
///   ftt_only: dense in -> +PE -> encoder x n_layers -> mean over time -> dense head
class FttGru {
public:
    static FttGru build(const ModelConfig& config, std::uint64_t seed) {
        config.validate();
        FttGru m(config, seed);
        Rng rng(seed);
        m.input_.init(rng);
        for (auto& enc : m.encoders_) {
            enc.init(rng);
        }
        if (config.uses_gru()) {
            m.gru_.init(rng);
        }
        m.head_.init(rng);
        return m;
    }

    const ModelConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }

    void set_target_affine(double offset, double scale) {
        config_.target_offset = offset;
        config_.target_scale = scale;
        config_.validate();
    }

    Tensor forward(const Tensor& x, ModelCache& cache) const {
        check_input(x);
        const std::size_t batch = x.dim(0);
        cache = ModelCache{};
        cache.owner = this;
        cache.batch = batch;
        cache.trace.push_back({"input", x.shape()});

        Tensor h = input_.forward(x, cache.input);
        cache.trace.push_back({"embedding", h.shape()});
        if (config_.uses_encoder()) {
            nn::add_positional(h, positions_);
            cache.trace.push_back({"positional", h.shape()});
            cache.encoders.resize(encoders_.size());
            for (std::size_t i = 0; i < encoders_.size(); ++i) {
                h = encoders_[i].forward(h, cache.encoders[i]);
                cache.trace.push_back({"encoder." + std::to_string(i), h.shape()});
            }
        }
        Tensor summary;
        if (config_.uses_gru()) {
            nn::GruOutput out = gru_.forward(h, Tensor{}, cache.gru);
            cache.trace.push_back({"gru", out.all_h.shape()});
            summary = std::move(out.last_h);
            cache.trace.push_back({"last_hidden", summary.shape()});
        } else {
            summary = nn::mean_over_time(h);
            cache.trace.push_back({"mean_pool", summary.shape()});
        }
        Tensor y = head_.forward(summary, cache.head);
        cache.trace.push_back({"head", y.shape()});
        Tensor pred = finish(y);
        cache.trace.push_back({"prediction", pred.shape()});
        return pred;
    }

    /// Same result as forward() without keeping any intermediates.
    Tensor predict(const Tensor& x) const {
        check_input(x);
        Tensor h = input_.apply(x);
        if (config_.uses_encoder()) {
            nn::add_positional(h, positions_);
            for (const auto& enc : encoders_) {
                h = enc.apply(h);
            }
        }
        const Tensor summary = config_.uses_gru() ? gru_.apply(h).last_h : nn::mean_over_time(h);
        return finish(head_.apply(summary));
    }

    /// Accumulates dL/dtheta for every parameter given dL/dpred.
    void backward(const Tensor& dpred, ModelCache& cache) {
        if (cache.owner != this) {
            throw ShapeError("model backward called with a cache from another model");
        }
        dpred.require_shape({cache.batch}, "model backward");
        Tensor dy({cache.batch, 1});
        for (std::size_t b = 0; b < cache.batch; ++b) {
            dy[b] = dpred[b] * config_.target_scale;
        }
        Tensor d_summary = head_.backward(dy, cache.head);
        Tensor dh;
        if (config_.uses_gru()) {
            dh = gru_.backward(Tensor{}, d_summary, cache.gru).dx;
        } else {
            dh = nn::mean_over_time_backward(d_summary, config_.seq_len);
        }
        for (std::size_t i = encoders_.size(); i-- > 0;) {
            dh = encoders_[i].backward(dh, cache.encoders[i]);
        }
        input_.backward(dh, cache.input);
    }

    nn::ParameterRefs parameters() {
        nn::ParameterRefs out;
        input_.collect(out);
        for (auto& enc : encoders_) {
            enc.collect(out);
        }
        if (config_.uses_gru()) {
            gru_.collect(out);
        }
        head_.collect(out);
        return out;
    }

    std::vector<const nn::Parameter*> parameters() const {
        auto refs = const_cast<FttGru*>(this)->parameters();
        return {refs.begin(), refs.end()};
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto* p : parameters()) {
            n += p->size();
        }
        return n;
    }

    void zero_grad() {
        for (auto* p : parameters()) {
            p->zero_grad();
        }
    }

    std::vector<EncoderLayer>& encoders() noexcept { return encoders_; }
    nn::Gru& gru() noexcept { return gru_; }

private:
    FttGru(const ModelConfig& config, std::uint64_t seed)
        : config_(config), seed_(seed), input_("input", config.n_features, config.d_model) {
        if (config.uses_encoder()) {
            positions_ = nn::positional_encoding(config.seq_len, config.d_model);
            const nn::MixMode mode = config.identity_mixing ? nn::MixMode::identity
                                     : config.fnet_mode     ? nn::MixMode::fnet
                                                            : nn::MixMode::spectral;
            for (std::size_t i = 0; i < config.n_layers; ++i) {
                encoders_.emplace_back("encoder" + std::to_string(i), config.seq_len, config.d_model,
                                       config.n_heads, config.ffn_width, mode);
            }
        }
        if (config.uses_gru()) {
            gru_ = nn::Gru("gru", config.d_model, config.gru_units);
        }
        head_ = nn::Dense("head", config.uses_gru() ? config.gru_units : config.d_model, 1);
    }

    Tensor finish(const Tensor& head) const {
        const std::size_t batch = head.dim(0);
        Tensor pred({batch});
        for (std::size_t b = 0; b < batch; ++b) {
            pred[b] = config_.target_offset + config_.target_scale * head[b];
        }
        pred.require_finite("model output");
        return pred;
    }

    void check_input(const Tensor& x) const {
        if (x.rank() != 3 || x.dim(1) != config_.seq_len || x.dim(2) != config_.n_features) {
            throw ShapeError("model input: expected [B," + std::to_string(config_.seq_len) + "," +
                             std::to_string(config_.n_features) + "], got " + shape_string(x.shape()));
        }
        x.require_finite("model input");
    }

    ModelConfig config_;
    std::uint64_t seed_ = 0;
    nn::Dense input_;
    Tensor positions_;
    std::vector<EncoderLayer> encoders_;
    nn::Gru gru_;
    nn::Dense head_;
};

} // namespace fttgru::model
