// Command-line driver: prepare, train, evaluate, ablate, bench, report.
//
// Exit codes: 0 success, 1 runtime failure, 2 missing or malformed file,
// 3 invalid configuration, CLI11's own codes for usage errors.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fttgru/app/commands.hpp"

namespace {

using namespace fttgru;

struct Flags {
    std::string config;
    std::optional<std::string> data_dir;
    std::optional<std::string> out_dir;
    std::optional<std::string> variant;
    std::vector<std::uint64_t> seeds;
    std::optional<int> rul_cap;
    bool synthetic = false;
    bool fnet_mode = false;
};

app::AppConfig resolve(const Flags& f) {
    app::AppConfig cfg;
    if (const char* env = std::getenv("FTTGRU_DATA_DIR")) {
        cfg.data.data_dir = env;
    }
    if (!f.config.empty()) {
        app::apply_config_file(cfg, f.config);
    }
    if (f.data_dir) cfg.data.data_dir = *f.data_dir;
    if (f.out_dir) cfg.out_dir = *f.out_dir;
    if (f.variant) cfg.model.variant = model::parse_variant(*f.variant);
    if (!f.seeds.empty()) cfg.train.seeds = f.seeds;
    if (f.rul_cap) cfg.data.rul_cap = *f.rul_cap;
    if (f.synthetic) cfg.data.synthetic = true;
    if (f.fnet_mode) cfg.model.fnet_mode = true;
    cfg.validate();
    return cfg;
}

int run(const std::function<void(const app::AppConfig&, std::ostream&)>& command, const Flags& flags) {
    try {
        command(resolve(flags), std::cerr);
        return 0;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"FTT-GRU remaining-useful-life regression on CMAPSS FD001"};
    cli.require_subcommand(1);
    Flags flags;

    const std::map<std::string, std::pair<std::string, std::function<void(const app::AppConfig&, std::ostream&)>>>
        commands{
            {"prepare", {"Validate the dataset, fit the normalizer and write the window index", app::run_prepare}},
            {"train", {"Train one variant for every seed; write histories and checkpoints", app::run_train}},
            {"evaluate", {"Evaluate saved checkpoints on the test windows", app::run_evaluate}},
            {"ablate", {"Train, evaluate and benchmark all three variants under shared seeds", app::run_ablate}},
            {"bench", {"Measure CPU inference latency of a saved checkpoint", app::run_bench}},
            {"report", {"Merge metrics, latency, curves and predictions into summary tables", app::run_report}},
        };

    int status = 0;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = cli.add_subcommand(name, entry.first);
        sub->add_option("--config", flags.config, "key = value configuration file");
        sub->add_option("--data-dir", flags.data_dir, "Directory with train_FD001.txt, test_FD001.txt, RUL_FD001.txt "
                                                      "(default: $FTTGRU_DATA_DIR)");
        sub->add_option("--out-dir", flags.out_dir, "Directory for CSV and checkpoint outputs (default: results)");
        sub->add_option("--variant", flags.variant, "hybrid, gru_only or ftt_only");
        sub->add_option("--seeds", flags.seeds, "Training seeds, one run per seed");
        sub->add_option("--rul-cap", flags.rul_cap, "Clamp training labels at this many cycles");
        sub->add_flag("--synthetic", flags.synthetic, "Use generated degradation data instead of FD001");
        sub->add_flag("--fnet-mode", flags.fnet_mode, "Unfiltered real-part Fourier mixing");
        const auto& command = entry.second;
        sub->callback([&status, &flags, &command] { status = run(command, flags); });
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e);
    }
    return status;
}
