#pragma once

#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "fttgru/error.hpp"

namespace fttgru::model {

enum class Variant { hybrid, gru_only, ftt_only };

inline std::string to_string(Variant v) {
    switch (v) {
    case Variant::hybrid: return "hybrid";
    case Variant::gru_only: return "gru_only";
    case Variant::ftt_only: return "ftt_only";
    }
    return "unknown";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "hybrid") return Variant::hybrid;
    if (s == "gru_only") return Variant::gru_only;
    if (s == "ftt_only") return Variant::ftt_only;
    throw ConfigError("unknown variant '" + std::string(s) + "' (expected hybrid, gru_only or ftt_only)");
}

struct ModelConfig {
    Variant variant = Variant::hybrid;
    std::size_t seq_len = 30;
    std::size_t n_features = 24;
    std::size_t d_model = 64;
    std::size_t n_layers = 2;
    std::size_t n_heads = 4;
    std::size_t gru_units = 64;
    std::size_t ffn_width = 128;
    bool fnet_mode = false;
    // Replaces token mixing with the identity. Only used as a reference path.
    bool identity_mixing = false;
    // pred = target_offset + target_scale * head(summary). Not learned; the
    // trainer sets them from the training labels so the head works in unit scale.
    double target_offset = 0.0;
    double target_scale = 1.0;

    bool uses_encoder() const { return variant != Variant::gru_only; }
    bool uses_gru() const { return variant != Variant::ftt_only; }

    void validate() const {
        auto require = [](bool ok, const std::string& msg) {
            if (!ok) throw ConfigError("model config: " + msg);
        };
        require(seq_len >= 1, "seq_len must be >= 1");
        require(n_features >= 1, "n_features must be >= 1");
        require(d_model >= 2 && d_model % 2 == 0, "d_model must be even and >= 2");
        require(n_heads >= 1 && d_model % n_heads == 0, "d_model must be divisible by n_heads");
        require(!uses_encoder() || n_layers >= 1, "n_layers must be >= 1 for encoder variants");
        require(gru_units >= 1, "gru_units must be >= 1");
        require(ffn_width >= 1, "ffn_width must be >= 1");
        require(target_scale > 0.0, "target_scale must be positive");
    }

    /// key=value lines, one per field, in a fixed order.
    std::string serialize() const {
        std::ostringstream os;
        os.precision(17);
        os << "variant=" << to_string(variant) << '\n'
           << "seq_len=" << seq_len << '\n'
           << "n_features=" << n_features << '\n'
           << "d_model=" << d_model << '\n'
           << "n_layers=" << n_layers << '\n'
           << "n_heads=" << n_heads << '\n'
           << "gru_units=" << gru_units << '\n'
           << "ffn_width=" << ffn_width << '\n'
           << "fnet_mode=" << (fnet_mode ? 1 : 0) << '\n'
           << "identity_mixing=" << (identity_mixing ? 1 : 0) << '\n'
           << "target_offset=" << std::hexfloat << target_offset << '\n'
           << "target_scale=" << target_scale << '\n';
        return os.str();
    }

    static ModelConfig deserialize(const std::string& text) {
        std::map<std::string, std::string> kv;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("model config: malformed line '" + line + "'");
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        auto take = [&](const std::string& key) {
            auto it = kv.find(key);
            if (it == kv.end()) throw ConfigError("model config: missing key '" + key + "'");
            std::string v = it->second;
            kv.erase(it);
            return v;
        };
        auto size = [&](const std::string& key) { return static_cast<std::size_t>(std::stoull(take(key))); };
        ModelConfig c;
        c.variant = parse_variant(take("variant"));
        c.seq_len = size("seq_len");
        c.n_features = size("n_features");
        c.d_model = size("d_model");
        c.n_layers = size("n_layers");
        c.n_heads = size("n_heads");
        c.gru_units = size("gru_units");
        c.ffn_width = size("ffn_width");
        c.fnet_mode = take("fnet_mode") == "1";
        c.identity_mixing = take("identity_mixing") == "1";
        c.target_offset = std::strtod(take("target_offset").c_str(), nullptr);
        c.target_scale = std::strtod(take("target_scale").c_str(), nullptr);
        if (!kv.empty()) throw ConfigError("model config: unknown key '" + kv.begin()->first + "'");
        c.validate();
        return c;
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

} // namespace fttgru::model
