#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fttgru/data/cmapss.hpp"
#include "fttgru/error.hpp"
#include "fttgru/rng.hpp"

namespace fttgru::data {

struct SyntheticData {
    std::vector<EngineSeries> train;  // run to failure
    std::vector<EngineSeries> test;   // truncated before failure
    std::vector<double> test_rul;     // cycles left after each truncated series
};

/// Degradation simulator for dataset-free runs. Each engine lives T ~ U{150..300}
/// cycles; sensor j reads base_j + drift_j (t/T)^p_j + noise. Settings are pure noise.
/// Test engines are cut between 1 and min(150, T - 30) cycles before failure.
inline SyntheticData synth_generate(std::size_t n_engines, std::uint64_t seed) {
    if (n_engines == 0) {
        throw ConfigError("synthetic data needs at least one engine");
    }
    Rng rng(seed);
    struct Channel {
        double base, drift, power, noise;
    };
    std::array<Channel, kFeatures> channels{};
    for (std::size_t j = 0; j < kSettings; ++j) {
        channels[j] = {rng.uniform(-0.005, 0.005), 0.0, 1.0, 0.002};
    }
    for (std::size_t j = kSettings; j < kFeatures; ++j) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        channels[j] = {rng.uniform(10.0, 100.0), sign * rng.uniform(4.0, 12.0), rng.uniform(1.5, 3.0),
                       rng.uniform(0.5, 1.5)};
    }

    auto simulate = [&](int unit, int life, int observed) {
        std::array<double, kFeatures> offset{};
        for (std::size_t j = 0; j < kFeatures; ++j) {
            offset[j] = 0.3 * channels[j].noise * rng.normal();
        }
        EngineSeries e;
        e.unit_id = unit;
        for (int t = 1; t <= observed; ++t) {
            const double u = static_cast<double>(t) / static_cast<double>(life);
            FeatureRow row{};
            for (std::size_t j = 0; j < kFeatures; ++j) {
                const Channel& c = channels[j];
                row[j] = c.base + offset[j] + c.drift * std::pow(u, c.power) + c.noise * rng.normal();
            }
            e.push_back(t, row);
        }
        return e;
    };

    SyntheticData out;
    for (std::size_t i = 0; i < n_engines; ++i) {
        const int life = static_cast<int>(rng.uniform_int(150, 300));
        out.train.push_back(simulate(static_cast<int>(i) + 1, life, life));
    }
    for (std::size_t i = 0; i < n_engines; ++i) {
        const int life = static_cast<int>(rng.uniform_int(150, 300));
        const int rul = static_cast<int>(rng.uniform_int(1, std::min(150, life - 30)));
        out.test.push_back(simulate(static_cast<int>(i) + 1, life, life - rul));
        out.test_rul.push_back(rul);
    }
    return out;
}

} // namespace fttgru::data
