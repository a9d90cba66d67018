#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "fttgru/error.hpp"
#include "fttgru/rng.hpp"

namespace fttgru::training {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
};

/// Sample quantile with linear interpolation between order statistics
/// (h = (n - 1) p). `sorted` must be ascending.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw ShapeError("quantile of an empty sample");
    }
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Mean written as x0 + mean(x - x0), so an all-equal sample returns x0 exactly.
inline double stable_mean(const std::vector<double>& x) {
    if (x.empty()) {
        throw ShapeError("mean of an empty sample");
    }
    double acc = 0.0;
    for (double v : x) {
        acc += v - x.front();
    }
    return x.front() + acc / static_cast<double>(x.size());
}

/// Percentile bootstrap over n items. Each resample draws n indices with
/// replacement (rng.index) and evaluates `statistic` on them.
inline Interval bootstrap_percentile(std::size_t n, const std::function<double(const std::vector<std::size_t>&)>& statistic,
                                     std::size_t resamples, double level, std::uint64_t seed) {
    if (n == 0) {
        throw ShapeError("bootstrap: empty sample");
    }
    if (resamples == 0) {
        throw ConfigError("bootstrap: resamples must be positive");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("bootstrap: level must lie in (0, 1)");
    }
    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    std::vector<double> stats(resamples);
    for (auto& s : stats) {
        for (auto& i : idx) {
            i = rng.index(n);
        }
        s = statistic(idx);
    }
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

/// Percentile bootstrap interval for the mean of `values`.
inline Interval bootstrap_ci(const std::vector<double>& values, std::size_t resamples = 1000, double level = 0.95,
                             std::uint64_t seed = 0) {
    std::vector<double> picked(values.size());
    return bootstrap_percentile(
        values.size(),
        [&](const std::vector<std::size_t>& idx) {
            for (std::size_t i = 0; i < idx.size(); ++i) {
                picked[i] = values[idx[i]];
            }
            return stable_mean(picked);
        },
        resamples, level, seed);
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = stable_mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// mean +/- t_{(1+level)/2, k-1} sd / sqrt(k). Zero width when k == 1.
inline Interval t_interval(const std::vector<double>& x, double level = 0.95) {
    const double m = stable_mean(x);
    if (x.size() < 2) {
        return {m, m};
    }
    const boost::math::students_t dist(static_cast<double>(x.size() - 1));
    const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
    const double half = t * sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
    return {m - half, m + half};
}

} // namespace fttgru::training
