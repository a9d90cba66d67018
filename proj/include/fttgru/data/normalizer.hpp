#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "fttgru/data/cmapss.hpp"
#include "fttgru/error.hpp"

namespace fttgru::data {

/// Per-feature min-max scaling fitted on training engines only.
/// Constant features map to 0; values outside the fitted range are not clipped.
class Normalizer {
public:
    static Normalizer fit(const std::vector<EngineSeries>& train) {
        Normalizer n;
        n.min_.fill(std::numeric_limits<double>::infinity());
        n.max_.fill(-std::numeric_limits<double>::infinity());
        std::size_t rows = 0;
        for (const auto& e : train) {
            for (std::size_t t = 0; t < e.length(); ++t) {
                const FeatureRow row = e.features(t);
                for (std::size_t j = 0; j < kFeatures; ++j) {
                    n.min_[j] = std::min(n.min_[j], row[j]);
                    n.max_[j] = std::max(n.max_[j], row[j]);
                }
                ++rows;
            }
        }
        if (rows == 0) {
            throw ShapeError("normalizer: no training rows to fit");
        }
        n.fitted_ = true;
        return n;
    }

    bool fitted() const noexcept { return fitted_; }
    const std::array<double, kFeatures>& min() const { return min_; }
    const std::array<double, kFeatures>& max() const { return max_; }

    FeatureRow apply(const FeatureRow& row) const {
        require_fitted();
        FeatureRow out{};
        for (std::size_t j = 0; j < kFeatures; ++j) {
            const double span = max_[j] - min_[j];
            out[j] = span > 0.0 ? (row[j] - min_[j]) / span : 0.0;
        }
        return out;
    }

    EngineSeries apply(const EngineSeries& e) const {
        require_fitted();
        EngineSeries out;
        out.unit_id = e.unit_id;
        for (std::size_t t = 0; t < e.length(); ++t) {
            out.push_back(e.cycles[t], apply(e.features(t)));
        }
        return out;
    }

    std::vector<EngineSeries> apply(const std::vector<EngineSeries>& engines) const {
        std::vector<EngineSeries> out;
        out.reserve(engines.size());
        for (const auto& e : engines) {
            out.push_back(apply(e));
        }
        return out;
    }

private:
    void require_fitted() const {
        if (!fitted_) {
            throw ConfigError("normalizer used before fit");
        }
    }

    std::array<double, kFeatures> min_{};
    std::array<double, kFeatures> max_{};
    bool fitted_ = false;
};

} // namespace fttgru::data
