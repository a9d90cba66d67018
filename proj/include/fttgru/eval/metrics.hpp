#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fttgru/data/windows.hpp"
#include "fttgru/error.hpp"
#include "fttgru/model/ftt_gru.hpp"
#include "fttgru/training/stats.hpp"
#include "fttgru/training/trainer.hpp"

namespace fttgru::eval {

using training::Interval;

struct MetricCis {
    Interval rmse;
    Interval mae;
    Interval r2;
};

struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;                       // NaN when the truth is constant
    std::string r2_note;                   // why r2 is NaN, empty otherwise
    std::vector<double> per_engine_errors; // pred - truth
    std::optional<MetricCis> ci;
};

namespace detail {

struct Sums {
    double sq = 0.0, abs = 0.0, mean = 0.0, tot = 0.0;
};

/// Error sums over the items `idx` (all items when empty).
inline Sums sums(const std::vector<double>& pred, const std::vector<double>& truth, const std::vector<std::size_t>& idx) {
    const std::size_t n = idx.empty() ? pred.size() : idx.size();
    auto at = [&](std::size_t i) { return idx.empty() ? i : idx[i]; };
    Sums s;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pred[at(i)] - truth[at(i)];
        s.sq += e * e;
        s.abs += std::abs(e);
        t[i] = truth[at(i)];
    }
    s.mean = training::stable_mean(t);
    for (double v : t) {
        s.tot += (v - s.mean) * (v - s.mean);
    }
    return s;
}

inline double r2_of(const Sums& s) { return s.tot > 0.0 ? 1.0 - s.sq / s.tot : std::nan(""); }

} // namespace detail

/// RMSE, MAE and R^2 (test-set mean in the denominator).
inline MetricsReport compute_metrics(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) {
        throw ShapeError("metrics: " + std::to_string(pred.size()) + " predictions for " +
                         std::to_string(truth.size()) + " targets");
    }
    if (pred.empty()) {
        throw ShapeError("metrics: empty input");
    }
    const detail::Sums s = detail::sums(pred, truth, {});
    const auto n = static_cast<double>(pred.size());
    MetricsReport r;
    r.rmse = std::sqrt(s.sq / n);
    r.mae = s.abs / n;
    r.r2 = detail::r2_of(s);
    if (std::isnan(r.r2)) {
        r.r2_note = pred.size() < 2 ? "R^2 undefined: fewer than two targets"
                                    : "R^2 undefined: targets are constant (zero variance)";
    }
    r.per_engine_errors.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        r.per_engine_errors[i] = pred[i] - truth[i];
    }
    return r;
}

inline MetricsReport compute_metrics(const Tensor& pred, const Tensor& truth) {
    return compute_metrics(pred.values(), truth.values());
}

/// Percentile-bootstrap intervals over items (engines). Every metric sees the
/// same resamples. A resample with constant truth makes the R^2 interval NaN.
inline MetricCis bootstrap_metrics(const std::vector<double>& pred, const std::vector<double>& truth,
                                   std::size_t resamples = 1000, double level = 0.95, std::uint64_t seed = 0) {
    compute_metrics(pred, truth);
    const auto n = static_cast<double>(pred.size());
    bool r2_defined = true;
    MetricCis ci;
    ci.rmse = training::bootstrap_percentile(
        pred.size(), [&](const auto& idx) { return std::sqrt(detail::sums(pred, truth, idx).sq / n); }, resamples,
        level, seed);
    ci.mae = training::bootstrap_percentile(
        pred.size(), [&](const auto& idx) { return detail::sums(pred, truth, idx).abs / n; }, resamples, level, seed);
    ci.r2 = training::bootstrap_percentile(
        pred.size(),
        [&](const auto& idx) {
            const double v = detail::r2_of(detail::sums(pred, truth, idx));
            if (std::isnan(v)) {
                r2_defined = false;
                return 0.0;
            }
            return v;
        },
        resamples, level, seed);
    if (!r2_defined) {
        ci.r2 = {std::nan(""), std::nan("")};
    }
    return ci;
}

/// One row of the predicted-vs-actual scatter.
struct PredictionRow {
    int engine = 0;
    double truth = 0.0;
    double pred = 0.0;
    Interval ci;
};

struct Evaluation {
    MetricsReport metrics;
    std::vector<PredictionRow> rows;
};

struct EvalOptions {
    std::size_t resamples = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
};

/// Metrics of one model on a test batch, with per-engine bootstrap intervals.
/// Prediction rows carry a zero-width interval.
inline Evaluation evaluate_model(const model::FttGru& m, const data::WindowBatch& test, const EvalOptions& opt = {}) {
    if (test.size() == 0) {
        throw ShapeError("evaluate: empty test batch");
    }
    const std::vector<double> pred = training::predict_all(m, test.x);
    const std::vector<double> truth = test.y.values();
    Evaluation ev;
    ev.metrics = compute_metrics(pred, truth);
    ev.metrics.ci = bootstrap_metrics(pred, truth, opt.resamples, opt.level, opt.seed);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ev.rows.push_back({test.engine_ids[i], truth[i], pred[i], {pred[i], pred[i]}});
    }
    return ev;
}

/// Per-engine mean prediction over several models, with a t interval across
/// them for each engine. Metrics and bootstrap intervals use the mean prediction.
inline Evaluation evaluate_ensemble(const std::vector<const model::FttGru*>& models, const data::WindowBatch& test,
                                    const EvalOptions& opt = {}) {
    if (models.empty()) {
        throw ConfigError("evaluate: no models");
    }
    if (test.size() == 0) {
        throw ShapeError("evaluate: empty test batch");
    }
    std::vector<std::vector<double>> per_model;
    for (const auto* m : models) {
        per_model.push_back(training::predict_all(*m, test.x));
    }
    const std::vector<double> truth = test.y.values();
    Evaluation ev;
    std::vector<double> mean(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        std::vector<double> draws;
        for (const auto& p : per_model) {
            draws.push_back(p[i]);
        }
        const Interval ci = training::t_interval(draws, opt.level);
        mean[i] = training::stable_mean(draws);
        ev.rows.push_back({test.engine_ids[i], truth[i], mean[i], ci});
    }
    ev.metrics = compute_metrics(mean, truth);
    ev.metrics.ci = bootstrap_metrics(mean, truth, opt.resamples, opt.level, opt.seed);
    return ev;
}

} // namespace fttgru::eval
