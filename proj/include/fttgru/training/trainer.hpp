#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fttgru/data/windows.hpp"
#include "fttgru/io/csv.hpp"
#include "fttgru/model/ftt_gru.hpp"
#include "fttgru/nn/functional.hpp"
#include "fttgru/training/optim.hpp"
#include "fttgru/training/stats.hpp"

namespace fttgru::training {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double lr_max = 1e-3;
    double lr_min = 1e-5;
    AdamConfig adam;
    std::size_t patience = 10;
    double min_delta = 1e-4;
    std::vector<std::uint64_t> seeds{42, 43, 44};

    void validate() const {
        if (epochs == 0) throw ConfigError("epochs must be at least 1");
        if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
        if (!(lr_min > 0.0 && lr_min <= lr_max)) throw ConfigError("learning rates need 0 < lr_min <= lr_max");
        if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be non-negative");
        if (seeds.empty()) throw ConfigError("at least one seed is required");
        Adam check(adam);
        (void)check;
    }
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0;
    double val_mse = 0.0;   // NaN without a validation split
    double lr = 0.0;        // rate used for the epoch's last step
    double seconds = 0.0;
};

struct RunHistory {
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // 1-based
    bool stopped_early = false;
};

struct RunResult {
    model::FttGru model;
    RunHistory history;
};

/// Predictions for a whole batch, evaluated in chunks.
inline std::vector<double> predict_all(const model::FttGru& m, const Tensor& x, std::size_t chunk = 256) {
    const std::size_t n = x.dim(0);
    const std::size_t block = x.size() / n;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        const std::size_t count = std::min(chunk, n - begin);
        Tensor part({count, x.dim(1), x.dim(2)});
        std::copy_n(x.data().begin() + begin * block, count * block, part.data().begin());
        const Tensor pred = m.predict(part);
        out.insert(out.end(), pred.data().begin(), pred.data().end());
    }
    return out;
}

inline double mse(const std::vector<double>& pred, const Tensor& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        acc += (pred[i] - y[i]) * (pred[i] - y[i]);
    }
    return acc / static_cast<double>(pred.size());
}

namespace detail {

inline std::vector<Tensor> snapshot(const model::FttGru& m) {
    std::vector<Tensor> out;
    for (const auto* p : m.parameters()) {
        out.push_back(p->value);
    }
    return out;
}

inline void restore(model::FttGru& m, const std::vector<Tensor>& values) {
    auto params = m.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i]->value = values[i];
    }
}

/// Separate stream for shuffling, so initialization and batching never share draws.
inline constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ull;

} // namespace detail

using EpochCallback = std::function<void(const EpochRecord&)>;

/// One seeded training run. The output affine is set from the training labels
/// (mean and standard deviation) before the first step.
inline RunResult train_run(const model::ModelConfig& model_cfg, const TrainConfig& cfg, const data::WindowBatch& train,
                           const data::WindowBatch& val, std::uint64_t seed, const EpochCallback& on_epoch = {}) {
    cfg.validate();
    if (train.size() == 0) {
        throw ShapeError("train_run: no training windows");
    }
    RunResult run{model::FttGru::build(model_cfg, seed), {}};
    run.history.seed = seed;
    model::FttGru& m = run.model;

    std::vector<double> labels(train.y.data().begin(), train.y.data().end());
    const double mean = stable_mean(labels);
    double var = 0.0;
    for (double v : labels) {
        var += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(var / static_cast<double>(labels.size()));
    m.set_target_affine(mean, sd > 0.0 ? sd : 1.0);

    Rng rng(seed ^ detail::kShuffleStream);
    Adam adam(cfg.adam);
    const nn::ParameterRefs params = m.parameters();
    m.zero_grad();

    const std::size_t n = train.size();
    const std::size_t per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    const std::size_t total = cfg.epochs * per_epoch;
    std::vector<std::size_t> order(n);
    std::vector<double> val_curve;
    std::vector<Tensor> best_values;
    std::size_t step = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(std::span(order));
        double loss_sum = 0.0;
        double lr = cfg.lr_max;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - begin);
            const data::WindowBatch batch =
                train.gather(std::vector<std::size_t>(order.begin() + begin, order.begin() + begin + count));
            model::ModelCache cache;
            const auto [loss, dpred] = nn::mse_loss(m.forward(batch.x, cache), batch.y);
            if (!std::isfinite(loss)) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                   std::to_string(step + 1) + " (seed " + std::to_string(seed) + ")");
            }
            m.backward(dpred, cache);
            lr = cosine_lr(step, total, cfg.lr_max, cfg.lr_min);
            adam.step(params, lr);
            loss_sum += loss * static_cast<double>(count);
            ++step;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_mse = loss_sum / static_cast<double>(n);
        rec.val_mse = val.size() > 0 ? mse(predict_all(m, val.x), val.y) : std::nan("");
        rec.lr = lr;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.history.epochs.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }

        if (val.size() == 0) {
            run.history.best_epoch = epoch;
            continue;
        }
        val_curve.push_back(rec.val_mse);
        const std::size_t best = best_epoch(val_curve, cfg.min_delta);
        if (best + 1 == epoch) {
            best_values = detail::snapshot(m);
        }
        run.history.best_epoch = best + 1;
        if (early_stop_check(val_curve, cfg.patience, cfg.min_delta)) {
            detail::restore(m, best_values);
            run.history.stopped_early = true;
            break;
        }
    }
    return run;
}

inline void write_history_csv(const std::string& path, const RunHistory& h) {
    io::CsvWriter out(path, "history", {"epoch", "train_mse", "val_mse", "lr", "seconds"});
    for (const auto& e : h.epochs) {
        out.row({std::to_string(e.epoch), io::format_number(e.train_mse), io::format_number(e.val_mse),
                 io::format_number(e.lr), io::format_number(e.seconds)});
    }
    out.close();
}

struct AggregateRow {
    std::size_t epoch = 0;
    std::size_t runs = 0;
    double mean_train = 0.0;
    Interval train_ci;
    double mean_val = 0.0;
    Interval val_ci;
};

/// Per-epoch mean and t-based 95% interval over the runs that reached that epoch.
inline std::vector<AggregateRow> aggregate_histories(const std::vector<RunHistory>& runs, double level = 0.95) {
    std::vector<AggregateRow> out;
    for (std::size_t epoch = 1;; ++epoch) {
        std::vector<double> tr, va;
        for (const auto& h : runs) {
            if (h.epochs.size() >= epoch) {
                tr.push_back(h.epochs[epoch - 1].train_mse);
                va.push_back(h.epochs[epoch - 1].val_mse);
            }
        }
        if (tr.empty()) {
            break;
        }
        AggregateRow row;
        row.epoch = epoch;
        row.runs = tr.size();
        row.train_ci = t_interval(tr, level);
        row.mean_train = stable_mean(tr);
        row.val_ci = t_interval(va, level);
        row.mean_val = stable_mean(va);
        out.push_back(row);
    }
    return out;
}

inline void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    io::CsvWriter out(path, "aggregate",
                      {"epoch", "runs", "mean_train", "ci_lo", "ci_hi", "mean_val", "val_ci_lo", "val_ci_hi"});
    for (const auto& r : rows) {
        out.row({std::to_string(r.epoch), std::to_string(r.runs), io::format_number(r.mean_train),
                 io::format_number(r.train_ci.lo), io::format_number(r.train_ci.hi), io::format_number(r.mean_val),
                 io::format_number(r.val_ci.lo), io::format_number(r.val_ci.hi)});
    }
    out.close();
}

/// Runs every seed in order. A failing seed is reported by number.
inline std::vector<RunResult> multi_run(const model::ModelConfig& model_cfg, const TrainConfig& cfg,
                                        const data::WindowBatch& train, const data::WindowBatch& val,
                                        const std::function<void(std::uint64_t, const EpochRecord&)>& on_epoch = {}) {
    cfg.validate();
    std::vector<RunResult> out;
    for (std::uint64_t seed : cfg.seeds) {
        try {
            out.push_back(train_run(model_cfg, cfg, train, val, seed, [&](const EpochRecord& r) {
                if (on_epoch) on_epoch(seed, r);
            }));
        } catch (const Error& e) {
            throw Error("run with seed " + std::to_string(seed) + " failed: " + e.what());
        }
    }
    return out;
}

} // namespace fttgru::training
