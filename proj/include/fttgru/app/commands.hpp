#pragma once

// Pipeline stages behind the command-line tool. Each stage reads and writes
// files under AppConfig::out_dir and throws on any failure; it returns only
// after every artifact it owns has been written.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fttgru/app/config.hpp"
#include "fttgru/data/prepare.hpp"
#include "fttgru/eval/reports.hpp"
#include "fttgru/io/csv.hpp"
#include "fttgru/model/checkpoint.hpp"
#include "fttgru/training/trainer.hpp"

namespace fttgru::app {

namespace fs = std::filesystem;

inline const std::vector<model::Variant>& all_variants() {
    static const std::vector<model::Variant> v{model::Variant::hybrid, model::Variant::gru_only,
                                               model::Variant::ftt_only};
    return v;
}

/// Artifact locations under the output directory.
struct Paths {
    fs::path root;

    std::string file(const std::string& name) const { return (root / name).string(); }
    std::string windows() const { return file("windows.csv"); }
    std::string summary() const { return file("dataset_summary.csv"); }
    std::string run_stem(model::Variant v, std::size_t run, std::uint64_t seed) const {
        return model::to_string(v) + "_run" + std::to_string(run + 1) + "_seed" + std::to_string(seed);
    }
    std::string history(model::Variant v, std::size_t run, std::uint64_t seed) const {
        return file("history_" + run_stem(v, run, seed) + ".csv");
    }
    std::string checkpoint(model::Variant v, std::size_t run, std::uint64_t seed) const {
        return file("checkpoint_" + run_stem(v, run, seed) + ".bin");
    }
    std::string aggregate(model::Variant v) const { return file("aggregate_" + model::to_string(v) + ".csv"); }
    std::string metrics(model::Variant v) const { return file("metrics_" + model::to_string(v) + ".csv"); }
    std::string predictions(model::Variant v) const { return file("predictions_" + model::to_string(v) + ".csv"); }
    std::string latency(model::Variant v) const { return file("latency_" + model::to_string(v) + ".csv"); }
    std::string ablation() const { return file("ablation.csv"); }
    std::string comparison() const { return file("comparison.csv"); }
    std::string results() const { return file("results.csv"); }
    std::string curves() const { return file("learning_curves.csv"); }
    std::string scatter() const { return file("scatter.csv"); }
};

inline Paths output_paths(const AppConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    return Paths{fs::path(cfg.out_dir)};
}

inline data::PreparedData load_prepared(const AppConfig& cfg, std::ostream& log) {
    cfg.validate();
    const data::RawData raw = data::load_raw(cfg.data);
    data::PreparedData d = data::prepare(raw, cfg.data);
    log << "data: " << d.train_engines << " train / " << d.val_engines << " val / " << d.test_engines
        << " test engines; " << d.train.size() << " / " << d.val.size() << " / " << d.test.size() << " windows\n";
    return d;
}

// ---------------------------------------------------------------- prepare

inline void write_dataset_summary(const std::string& path, const data::PreparedData& d) {
    io::CsvWriter out(path, "dataset_summary", {"split", "engines", "windows", "label_min", "label_max", "label_mean"});
    auto emit = [&](const char* split, std::size_t engines, const data::WindowBatch& b) {
        if (b.size() == 0) {
            out.row({split, std::to_string(engines), "0", "nan", "nan", "nan"});
            return;
        }
        const std::vector<double>& y = b.y.values();
        const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
        out.row({split, std::to_string(engines), std::to_string(b.size()), io::format_number(*lo),
                 io::format_number(*hi), io::format_number(training::stable_mean(y))});
    };
    emit("train", d.train_engines, d.train);
    emit("val", d.val_engines, d.val);
    emit("test", d.test_engines, d.test);
    out.close();
}

inline void run_prepare(const AppConfig& cfg, std::ostream& log) {
    const data::PreparedData d = load_prepared(cfg, log);
    const Paths p = output_paths(cfg);
    data::write_window_index(p.windows(), d);
    write_dataset_summary(p.summary(), d);
    log << "wrote " << p.windows() << " and " << p.summary() << '\n';
}

// ---------------------------------------------------------------- train

inline std::vector<training::RunResult> train_variant(const AppConfig& cfg, model::Variant variant,
                                                      const data::PreparedData& d, const Paths& p, std::ostream& log) {
    model::ModelConfig mc = cfg.model;
    mc.variant = variant;
    auto runs = training::multi_run(mc, cfg.train, d.train, d.val, [&](std::uint64_t seed, const training::EpochRecord& r) {
        log << model::to_string(variant) << " seed " << seed << " epoch " << r.epoch << ": train " << r.train_mse
            << " val " << r.val_mse << '\n';
    });
    std::vector<training::RunHistory> histories;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::uint64_t seed = cfg.train.seeds[i];
        training::write_history_csv(p.history(variant, i, seed), runs[i].history);
        model::save_checkpoint(runs[i].model, p.checkpoint(variant, i, seed));
        histories.push_back(runs[i].history);
    }
    training::write_aggregate_csv(p.aggregate(variant), training::aggregate_histories(histories));
    return runs;
}

inline void run_train(const AppConfig& cfg, std::ostream& log) {
    const data::PreparedData d = load_prepared(cfg, log);
    const Paths p = output_paths(cfg);
    train_variant(cfg, cfg.model.variant, d, p, log);
    log << "wrote histories, checkpoints and " << p.aggregate(cfg.model.variant) << '\n';
}

// ---------------------------------------------------------------- evaluate

inline std::vector<model::FttGru> load_checkpoints(const AppConfig& cfg, model::Variant variant, const Paths& p) {
    std::vector<model::FttGru> out;
    for (std::size_t i = 0; i < cfg.train.seeds.size(); ++i) {
        const std::string path = p.checkpoint(variant, i, cfg.train.seeds[i]);
        if (!fs::is_regular_file(path)) {
            throw IoError(path, "missing checkpoint (run `train` first)");
        }
        out.push_back(model::load_checkpoint(path));
        if (out.back().config().variant != variant) {
            throw IoError(path, "checkpoint holds variant " + model::to_string(out.back().config().variant));
        }
    }
    return out;
}

/// Per-seed metric rows followed by "mean" and "sd" rows.
inline std::vector<eval::MetricsRow> evaluate_variant(const AppConfig& cfg, model::Variant variant,
                                                      const std::vector<model::FttGru>& models,
                                                      const data::PreparedData& d, const Paths& p) {
    const eval::EvalOptions opt{cfg.bootstrap_resamples, 0.95, cfg.bootstrap_seed};
    const std::string name = eval::display_name(variant), tag = model::to_string(variant);
    std::vector<eval::MetricsRow> rows;
    std::vector<eval::MetricsReport> reports;
    std::vector<const model::FttGru*> ptrs;
    for (std::size_t i = 0; i < models.size(); ++i) {
        eval::Evaluation ev = eval::evaluate_model(models[i], d.test, opt);
        reports.push_back(ev.metrics);
        rows.push_back({name, tag, std::to_string(cfg.train.seeds[i]), ev.metrics});
        ptrs.push_back(&models[i]);
    }
    const auto [mean, sd] = eval::summarize(reports);
    rows.push_back({name, tag, "mean", mean});
    rows.push_back({name, tag, "sd", sd});
    eval::write_metrics_csv(p.metrics(variant), rows);
    eval::write_predictions_csv(p.predictions(variant), eval::evaluate_ensemble(ptrs, d.test, opt).rows);
    return rows;
}

inline void run_evaluate(const AppConfig& cfg, std::ostream& log) {
    const Paths p = output_paths(cfg);
    const std::vector<model::FttGru> models = load_checkpoints(cfg, cfg.model.variant, p);
    const data::PreparedData d = load_prepared(cfg, log);
    const auto rows = evaluate_variant(cfg, cfg.model.variant, models, d, p);
    const auto& mean = rows[rows.size() - 2].metrics;
    log << model::to_string(cfg.model.variant) << ": RMSE " << mean.rmse << " MAE " << mean.mae << " R2 " << mean.r2
        << '\n';
}

// ---------------------------------------------------------------- bench

inline eval::LatencyReport bench_model(const AppConfig& cfg, const model::FttGru& m) {
    return eval::bench_latency(m, {cfg.bench_warmup, cfg.bench_iters, 32, 0});
}

inline void run_bench(const AppConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Paths p = output_paths(cfg);
    const std::string path = p.checkpoint(cfg.model.variant, 0, cfg.train.seeds.front());
    if (!fs::is_regular_file(path)) {
        throw IoError(path, "missing checkpoint (run `train` first)");
    }
    const model::FttGru m = model::load_checkpoint(path);
    const eval::LatencyReport r = bench_model(cfg, m);
    eval::write_latency_csv(p.latency(cfg.model.variant), {{model::to_string(cfg.model.variant), r}});
    log << model::to_string(cfg.model.variant) << ": batch 1 mean " << r.batch1_mean_ms << " ms, median "
        << r.batch1_median_ms << " ms; batch 32 " << r.batch32_throughput_per_s << " samples/s\n";
}

// ---------------------------------------------------------------- ablate

inline std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
    std::string s;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        s += (i ? " " : "") + std::to_string(seeds[i]);
    }
    return s;
}

/// Trains, evaluates and benchmarks every variant under the same seeds.
inline void run_ablate(const AppConfig& cfg, std::ostream& log) {
    const data::PreparedData d = load_prepared(cfg, log);
    const Paths p = output_paths(cfg);
    std::vector<eval::ComparisonRow> table = eval::reference_baselines();
    io::CsvWriter ablation(p.ablation(), "ablation",
                           {"variant", "seeds", "rmse_mean", "rmse_sd", "mae_mean", "mae_sd", "r2_mean", "r2_sd",
                            "latency_ms"});
    eval::ComparisonRow hybrid;
    for (const model::Variant v : all_variants()) {
        std::vector<model::FttGru> models;
        for (auto& run : train_variant(cfg, v, d, p, log)) {
            models.push_back(std::move(run.model));
        }
        const auto rows = evaluate_variant(cfg, v, models, d, p);
        const auto& mean = rows[rows.size() - 2].metrics;
        const auto& sd = rows[rows.size() - 1].metrics;
        const eval::LatencyReport lat = bench_model(cfg, models.front());
        eval::write_latency_csv(p.latency(v), {{model::to_string(v), lat}});
        ablation.row({model::to_string(v), join_seeds(cfg.train.seeds), io::format_number(mean.rmse),
                      io::format_number(sd.rmse), io::format_number(mean.mae), io::format_number(sd.mae),
                      io::format_number(mean.r2), io::format_number(sd.r2), io::format_number(lat.batch1_mean_ms)});
        const eval::ComparisonRow row{eval::display_name(v), "measured", mean.rmse, mean.mae, mean.r2,
                                      lat.batch1_mean_ms};
        table.push_back(row);
        if (v == model::Variant::hybrid) {
            hybrid = row;
        }
        log << model::to_string(v) << ": RMSE " << mean.rmse << " MAE " << mean.mae << " R2 " << mean.r2 << '\n';
    }
    ablation.close();
    eval::write_comparison_csv(p.comparison(), table, hybrid);
}

// ---------------------------------------------------------------- report

/// Merges the per-variant artifacts present in out_dir into one results table
/// and plot-ready learning-curve and scatter files.
inline void run_report(const AppConfig& cfg, std::ostream& log) {
    const Paths p = output_paths(cfg);
    std::vector<eval::ComparisonRow> table = eval::reference_baselines();
    std::optional<eval::ComparisonRow> hybrid;
    io::CsvWriter curves(p.curves(), "learning_curves",
                         {"variant", "epoch", "mean_train", "ci_lo", "ci_hi", "mean_val", "val_ci_lo", "val_ci_hi"});
    io::CsvWriter scatter(p.scatter(), "scatter", {"variant", "engine", "truth", "pred", "ci_lo", "ci_hi"});
    for (const model::Variant v : all_variants()) {
        if (!fs::is_regular_file(p.metrics(v))) {
            continue;
        }
        const io::CsvTable metrics = io::read_csv(p.metrics(v));
        std::optional<std::size_t> mean_row;
        for (std::size_t r = 0; r < metrics.rows.size(); ++r) {
            if (metrics.rows[r][metrics.column("seed")] == "mean") mean_row = r;
        }
        if (!mean_row) {
            throw IoError(p.metrics(v), "no 'mean' row");
        }
        double latency = std::nan("");
        if (fs::is_regular_file(p.latency(v))) {
            latency = io::read_csv(p.latency(v)).number(0, "mean_ms");
        }
        const eval::ComparisonRow row{eval::display_name(v), "measured", metrics.number(*mean_row, "rmse"),
                                      metrics.number(*mean_row, "mae"), metrics.number(*mean_row, "r2"), latency};
        table.push_back(row);
        if (v == model::Variant::hybrid) {
            hybrid = row;
        }
        for (const auto& [path, sink] : {std::pair{p.aggregate(v), &curves}, std::pair{p.predictions(v), &scatter}}) {
            if (!fs::is_regular_file(path)) {
                continue;
            }
            for (const auto& cells : io::read_csv(path).rows) {
                std::vector<std::string> out{model::to_string(v)};
                if (sink == &curves) {
                    // Drop the aggregate's "runs" column.
                    out.push_back(cells[0]);
                    out.insert(out.end(), cells.begin() + 2, cells.end());
                } else {
                    out.insert(out.end(), cells.begin(), cells.end());
                }
                sink->row(out);
            }
        }
    }
    curves.close();
    scatter.close();
    if (table.size() == eval::reference_baselines().size()) {
        throw IoError(p.root.string(), "no metrics_<variant>.csv found (run `evaluate` or `ablate` first)");
    }
    if (!hybrid) {
        throw IoError(p.metrics(model::Variant::hybrid), "missing hybrid metrics needed for the improvement row");
    }
    eval::write_comparison_csv(p.results(), table, *hybrid);
    log << "wrote " << p.results() << ", " << p.curves() << " and " << p.scatter() << '\n';
}

} // namespace fttgru::app
