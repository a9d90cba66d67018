#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fttgru/data/normalizer.hpp"
#include "fttgru/data/synthetic.hpp"
#include "fttgru/data/windows.hpp"
#include "fttgru/io/csv.hpp"

namespace fttgru::data {

struct DataConfig {
    std::string data_dir;
    bool synthetic = false;
    std::size_t synthetic_engines = 50;
    std::uint64_t synthetic_seed = 2024;
    std::optional<int> rul_cap;
    double val_fraction = 0.1;
    WindowSpec window;

    std::filesystem::path train_file() const { return std::filesystem::path(data_dir) / "train_FD001.txt"; }
    std::filesystem::path test_file() const { return std::filesystem::path(data_dir) / "test_FD001.txt"; }
    std::filesystem::path rul_file() const { return std::filesystem::path(data_dir) / "RUL_FD001.txt"; }
};

/// Raw engines before normalization.
struct RawData {
    std::vector<EngineSeries> train;
    std::vector<EngineSeries> test;
    std::vector<double> test_rul;
};

/// Normalized windows ready for training and evaluation.
struct PreparedData {
    Normalizer normalizer;
    WindowBatch train;
    WindowBatch val;   // empty when val_fraction == 0
    WindowBatch test;
    std::size_t train_engines = 0;
    std::size_t val_engines = 0;
    std::size_t test_engines = 0;
};

inline RawData load_raw(const DataConfig& cfg) {
    if (cfg.synthetic) {
        SyntheticData s = synth_generate(cfg.synthetic_engines, cfg.synthetic_seed);
        return {std::move(s.train), std::move(s.test), std::move(s.test_rul)};
    }
    for (const auto& p : {cfg.train_file(), cfg.test_file(), cfg.rul_file()}) {
        if (!std::filesystem::is_regular_file(p)) {
            throw IoError(p.string(), "missing dataset file");
        }
    }
    RawData raw;
    raw.train = parse_cmapss(cfg.train_file().string());
    raw.test = parse_cmapss(cfg.test_file().string());
    raw.test_rul = parse_rul_file(cfg.rul_file().string());
    if (raw.test.size() != raw.test_rul.size()) {
        throw ShapeError(cfg.rul_file().string() + ": " + std::to_string(raw.test_rul.size()) +
                         " RUL values for " + std::to_string(raw.test.size()) + " test engines");
    }
    return raw;
}

/// Fits the normalizer on every training engine, holds out validation engines,
/// and builds train, validation, and test windows.
inline PreparedData prepare(const RawData& raw, const DataConfig& cfg) {
    PreparedData out;
    out.normalizer = Normalizer::fit(raw.train);
    auto [train, val] = split_validation(out.normalizer.apply(raw.train), cfg.val_fraction);
    out.train_engines = train.size();
    out.val_engines = val.size();
    out.test_engines = raw.test.size();
    out.train = make_train_windows(train, cfg.window, cfg.rul_cap);
    if (!val.empty()) {
        out.val = make_train_windows(val, cfg.window, cfg.rul_cap);
    }
    out.test = make_test_windows(out.normalizer.apply(raw.test), raw.test_rul, cfg.window);
    return out;
}

inline PreparedData prepare(const DataConfig& cfg) { return prepare(load_raw(cfg), cfg); }

/// Prepared-window cache: one row per window reference.
inline void write_window_index(const std::string& path, const PreparedData& d) {
    io::CsvWriter out(path, "windows", {"split", "engine", "start", "label"});
    auto emit = [&](const char* split, const WindowBatch& b) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            out.row({split, std::to_string(b.engine_ids[i]), std::to_string(b.starts[i]), io::format_number(b.y[i])});
        }
    };
    emit("train", d.train);
    emit("val", d.val);
    emit("test", d.test);
    out.close();
}

} // namespace fttgru::data
