#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

#include "fttgru/error.hpp"
#include "fttgru/model/ftt_gru.hpp"
#include "fttgru/rng.hpp"
#include "fttgru/training/stats.hpp"

namespace fttgru::eval {

struct LatencyReport {
    double batch1_mean_ms = 0.0;
    double batch1_median_ms = 0.0;
    double batch32_mean_ms = 0.0;
    double batch32_median_ms = 0.0;
    double batch32_throughput_per_s = 0.0;
    std::size_t warmup_iters = 0;
    std::size_t measured_iters = 0;
    std::size_t thread_count = 1;
};

struct LatencyOptions {
    std::size_t warmup = 100;
    std::size_t iters = 1000;
    std::size_t batch = 32;
    std::uint64_t input_seed = 0;
};

namespace detail {

/// Wall time in ms of each of `iters` calls to predict(x), after `warmup` untimed calls.
inline std::vector<double> time_forward(const model::FttGru& m, const Tensor& x, std::size_t warmup, std::size_t iters) {
    double sink = 0.0;
    for (std::size_t i = 0; i < warmup; ++i) {
        sink += m.predict(x)[0];
    }
    std::vector<double> ms(iters);
    for (auto& t : ms) {
        const auto t0 = std::chrono::steady_clock::now();
        const Tensor y = m.predict(x);
        const auto t1 = std::chrono::steady_clock::now();
        sink += y[0];
        t = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    volatile double keep = sink;
    (void)keep;
    return ms;
}

inline Tensor random_windows(const model::ModelConfig& c, std::size_t batch, Rng& rng) {
    Tensor x({batch, c.seq_len, c.n_features});
    for (double& v : x.data()) {
        v = rng.uniform();
    }
    return x;
}

} // namespace detail

/// Single-threaded forward latency at batch 1 and throughput at `opt.batch`.
/// Inputs are random windows in [0, 1) drawn once from `input_seed`.
inline LatencyReport bench_latency(const model::FttGru& m, const LatencyOptions& opt = {}) {
    if (opt.iters == 0) {
        throw ConfigError("bench: iters must be positive");
    }
    if (opt.batch == 0) {
        throw ConfigError("bench: batch must be positive");
    }
    Rng rng(opt.input_seed);
    const Tensor one = detail::random_windows(m.config(), 1, rng);
    const Tensor many = detail::random_windows(m.config(), opt.batch, rng);

    LatencyReport r;
    r.warmup_iters = opt.warmup;
    r.measured_iters = opt.iters;
    std::vector<double> t1 = detail::time_forward(m, one, opt.warmup, opt.iters);
    r.batch1_mean_ms = training::stable_mean(t1);
    std::sort(t1.begin(), t1.end());
    r.batch1_median_ms = training::quantile_sorted(t1, 0.5);

    std::vector<double> tb = detail::time_forward(m, many, opt.warmup, opt.iters);
    r.batch32_mean_ms = training::stable_mean(tb);
    std::sort(tb.begin(), tb.end());
    r.batch32_median_ms = training::quantile_sorted(tb, 0.5);
    r.batch32_throughput_per_s = static_cast<double>(opt.batch) * 1000.0 / r.batch32_mean_ms;
    return r;
}

} // namespace fttgru::eval
