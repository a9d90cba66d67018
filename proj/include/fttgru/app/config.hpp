#pragma once

// Flat key=value configuration shared by every command.
//
//   # comment
//   variant = hybrid
//   seeds = 42, 43, 44
//
// Unknown keys are rejected by name. Flags are applied after the file.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fttgru/data/prepare.hpp"
#include "fttgru/error.hpp"
#include "fttgru/model/config.hpp"
#include "fttgru/training/trainer.hpp"

namespace fttgru::app {

struct AppConfig {
    data::DataConfig data;
    model::ModelConfig model;
    training::TrainConfig train;
    std::string out_dir = "results";
    std::size_t bench_warmup = 100;
    std::size_t bench_iters = 1000;
    std::size_t bootstrap_resamples = 1000;
    std::uint64_t bootstrap_seed = 0;

    void validate() const {
        data.window.validate();
        if (!(data.val_fraction >= 0.0 && data.val_fraction < 1.0)) {
            throw ConfigError("val_fraction must lie in [0, 1)");
        }
        if (data.rul_cap && *data.rul_cap < 0) {
            throw ConfigError("rul_cap must be non-negative");
        }
        if (data.synthetic && data.synthetic_engines == 0) {
            throw ConfigError("synthetic_engines must be at least 1");
        }
        if (data.window.length != model.seq_len) {
            throw ConfigError("window length " + std::to_string(data.window.length) + " differs from seq_len " +
                              std::to_string(model.seq_len));
        }
        model.validate();
        train.validate();
        if (bench_iters == 0) {
            throw ConfigError("bench_iters must be positive");
        }
        if (bootstrap_resamples == 0) {
            throw ConfigError("bootstrap_resamples must be positive");
        }
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError("config key '" + key + "': not a valid number: '" + text + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

} // namespace detail

/// Seeds separated by commas and/or whitespace.
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            out.push_back(detail::parse_number<std::uint64_t>("seeds", token));
            token.clear();
        }
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t') {
            flush();
        } else {
            token += c;
        }
    }
    flush();
    if (out.empty()) {
        throw ConfigError("config key 'seeds': no seeds given");
    }
    return out;
}

/// Sets one configuration key. Throws ConfigError naming unknown keys.
inline void set_key(AppConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_number;
    auto size = [&] { return parse_number<std::size_t>(key, value); };
    auto real = [&] { return parse_number<double>(key, value); };

    if (key == "data_dir") c.data.data_dir = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "synthetic") c.data.synthetic = parse_bool(key, value);
    else if (key == "synthetic_engines") c.data.synthetic_engines = size();
    else if (key == "synthetic_seed") c.data.synthetic_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "rul_cap") {
        if (value == "none" || value.empty()) c.data.rul_cap.reset();
        else c.data.rul_cap = parse_number<int>(key, value);
    }
    else if (key == "val_fraction") c.data.val_fraction = real();
    else if (key == "window_overlap") c.data.window.overlap = real();
    else if (key == "variant") c.model.variant = model::parse_variant(value);
    else if (key == "seq_len") c.model.seq_len = c.data.window.length = size();
    else if (key == "n_features") c.model.n_features = size();
    else if (key == "d_model") c.model.d_model = size();
    else if (key == "n_layers") c.model.n_layers = size();
    else if (key == "n_heads") c.model.n_heads = size();
    else if (key == "gru_units") c.model.gru_units = size();
    else if (key == "ffn_width") c.model.ffn_width = size();
    else if (key == "fnet_mode") c.model.fnet_mode = parse_bool(key, value);
    else if (key == "epochs") c.train.epochs = size();
    else if (key == "batch_size") c.train.batch_size = size();
    else if (key == "lr_max") c.train.lr_max = real();
    else if (key == "lr_min") c.train.lr_min = real();
    else if (key == "adam_beta1") c.train.adam.beta1 = real();
    else if (key == "adam_beta2") c.train.adam.beta2 = real();
    else if (key == "adam_eps") c.train.adam.eps = real();
    else if (key == "patience") c.train.patience = size();
    else if (key == "min_delta") c.train.min_delta = real();
    else if (key == "seeds") c.train.seeds = parse_seeds(value);
    else if (key == "bench_warmup") c.bench_warmup = size();
    else if (key == "bench_iters") c.bench_iters = size();
    else if (key == "bootstrap_resamples") c.bootstrap_resamples = size();
    else if (key == "bootstrap_seed") c.bootstrap_seed = parse_number<std::uint64_t>(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

inline void apply_config_text(AppConfig& c, std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = detail::trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, line_no, "expected key = value");
        }
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        try {
            set_key(c, key, detail::trim(std::string_view(body).substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

inline void apply_config_file(AppConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path, "cannot open config file");
    }
    apply_config_text(c, in, path);
}

} // namespace fttgru::app
