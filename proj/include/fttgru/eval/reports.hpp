#pragma once

#include <string>
#include <vector>

#include "fttgru/eval/ablation.hpp"
#include "fttgru/eval/latency.hpp"
#include "fttgru/eval/metrics.hpp"
#include "fttgru/io/csv.hpp"

namespace fttgru::eval {

/// A metrics CSV row. `seed` is a seed number or a summary label ("mean", "sd").
struct MetricsRow {
    std::string model;
    std::string variant;
    std::string seed;
    MetricsReport metrics;
};

inline const std::vector<std::string>& metrics_header() {
    static const std::vector<std::string> h{"model",    "variant",   "seed",      "rmse",     "mae",
                                            "r2",       "rmse_ci_lo", "rmse_ci_hi", "mae_ci_lo", "mae_ci_hi",
                                            "r2_ci_lo", "r2_ci_hi"};
    return h;
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    io::CsvWriter out(path, "metrics", metrics_header());
    for (const auto& r : rows) {
        const double nan = std::nan("");
        const MetricCis ci = r.metrics.ci.value_or(MetricCis{{nan, nan}, {nan, nan}, {nan, nan}});
        out.row({r.model, r.variant, r.seed, io::format_number(r.metrics.rmse), io::format_number(r.metrics.mae),
                 io::format_number(r.metrics.r2), io::format_number(ci.rmse.lo), io::format_number(ci.rmse.hi),
                 io::format_number(ci.mae.lo), io::format_number(ci.mae.hi), io::format_number(ci.r2.lo),
                 io::format_number(ci.r2.hi)});
    }
    out.close();
}

/// Mean and sample SD of each metric over per-seed reports.
inline std::pair<MetricsReport, MetricsReport> summarize(const std::vector<MetricsReport>& runs) {
    std::vector<double> rmse, mae, r2;
    for (const auto& r : runs) {
        rmse.push_back(r.rmse);
        mae.push_back(r.mae);
        r2.push_back(r.r2);
    }
    MetricsReport mean, sd;
    mean.rmse = training::stable_mean(rmse);
    mean.mae = training::stable_mean(mae);
    mean.r2 = training::stable_mean(r2);
    sd.rmse = training::sample_sd(rmse);
    sd.mae = training::sample_sd(mae);
    sd.r2 = training::sample_sd(r2);
    return {mean, sd};
}

inline void write_predictions_csv(const std::string& path, const std::vector<PredictionRow>& rows) {
    io::CsvWriter out(path, "predictions", {"engine", "truth", "pred", "ci_lo", "ci_hi"});
    for (const auto& r : rows) {
        out.row({std::to_string(r.engine), io::format_number(r.truth), io::format_number(r.pred),
                 io::format_number(r.ci.lo), io::format_number(r.ci.hi)});
    }
    out.close();
}

/// Two rows per report: batch 1 and the throughput batch.
inline void write_latency_csv(const std::string& path, const std::vector<std::pair<std::string, LatencyReport>>& reports,
                              std::size_t batch = 32) {
    io::CsvWriter out(path, "latency",
                      {"variant", "batch", "mean_ms", "median_ms", "throughput", "warmup", "iters", "threads"});
    for (const auto& [variant, r] : reports) {
        auto emit = [&](std::size_t b, double mean, double median) {
            out.row({variant, std::to_string(b), io::format_number(mean), io::format_number(median),
                     io::format_number(static_cast<double>(b) * 1000.0 / mean), std::to_string(r.warmup_iters),
                     std::to_string(r.measured_iters), std::to_string(r.thread_count)});
        };
        emit(1, r.batch1_mean_ms, r.batch1_median_ms);
        emit(batch, r.batch32_mean_ms, r.batch32_median_ms);
    }
    out.close();
}

/// Comparison table followed by the improvement row for `ours`.
inline void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows,
                                 const ComparisonRow& ours) {
    io::CsvWriter out(path, "comparison", {"model", "source", "rmse", "mae", "r2", "latency_ms"});
    std::vector<ComparisonRow> baselines;
    for (const auto& r : rows) {
        if (r.source == "reference") {
            baselines.push_back(r);
        }
        out.row({r.model, r.source, io::format_number(r.rmse), io::format_number(r.mae), io::format_number(r.r2),
                 io::format_number(r.latency_ms)});
    }
    const Improvement imp = improvement_vs_best(ours, baselines);
    out.row({"improvement_pct_vs_best_baseline", ours.model, io::format_number(imp.rmse_pct),
             io::format_number(imp.mae_pct), io::format_number(imp.r2_pct), io::format_number(imp.latency_pct)});
    out.close();
}

} // namespace fttgru::eval
