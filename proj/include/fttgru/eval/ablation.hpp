#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fttgru/error.hpp"
#include "fttgru/model/config.hpp"

namespace fttgru::eval {

/// One row of the model comparison table.
struct ComparisonRow {
    std::string model;
    std::string source;  // "reference" (published figure) or "measured"
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    double latency_ms = 0.0;
};

/// Published FD001 baselines (RMSE, MAE, R^2, batch-1 CPU latency in ms).
inline std::vector<ComparisonRow> reference_baselines() {
    return {
        {"LSTM", "reference", 34.25, 21.85, 0.39, 1.30},
        {"Bi-LSTM", "reference", 32.67, 20.14, 0.41, 1.91},
        {"TCN-Attention", "reference", 31.12, 19.76, 0.44, 2.93},
    };
}

inline std::string display_name(model::Variant v) {
    switch (v) {
    case model::Variant::hybrid: return "FTT-GRU";
    case model::Variant::gru_only: return "GRU-only";
    case model::Variant::ftt_only: return "FTT-only";
    }
    return "unknown";
}

/// Percent improvement of `ours` over the best baseline in each column.
/// Lower is better for RMSE, MAE and latency; higher is better for R^2.
struct Improvement {
    double rmse_pct = 0.0;
    double mae_pct = 0.0;
    double r2_pct = 0.0;
    double latency_pct = 0.0;
};

inline Improvement improvement_vs_best(const ComparisonRow& ours, const std::vector<ComparisonRow>& baselines) {
    if (baselines.empty()) {
        throw ConfigError("improvement: no baselines");
    }
    ComparisonRow best = baselines.front();
    for (const auto& b : baselines) {
        best.rmse = std::min(best.rmse, b.rmse);
        best.mae = std::min(best.mae, b.mae);
        best.r2 = std::max(best.r2, b.r2);
        best.latency_ms = std::min(best.latency_ms, b.latency_ms);
    }
    auto lower_better = [](double mine, double ref) { return 100.0 * (ref - mine) / ref; };
    return {lower_better(ours.rmse, best.rmse), lower_better(ours.mae, best.mae),
            100.0 * (ours.r2 - best.r2) / std::abs(best.r2), lower_better(ours.latency_ms, best.latency_ms)};
}

} // namespace fttgru::eval
