// candlelang: batch driver for the candlestick-language forecasting pipeline.
//
//   candlelang train    --config <file> [--out <dir>]
//   candlelang evaluate --config <file> --out <dir>
//   candlelang sweep-nw --ticker <sym> --min <k> --max <k> [--config <file> | --data-dir <dir>]
//   candlelang label    --ticker <sym> [--config <file> | --data-dir <dir>] [--out <file>]
//
// Exit codes: 0 success, 1 some tickers failed, 2 configuration or data error.

#include "candlelang/errors.hpp"
#include "candlelang/labeler.hpp"
#include "candlelang/lexicon.hpp"
#include "candlelang/market_data.hpp"
#include "candlelang/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace candlelang;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitDataError = 2;

int report_failures(const PhaseReport& report) {
    for (const auto& f : report.failures) std::cerr << "ticker " << f.ticker << " failed: " << f.error << '\n';
    return report.failures.empty() ? kExitOk : kExitPartial;
}

// Config from --config when given, otherwise defaults with --data-dir.
ExperimentConfig resolve_config(const std::string& config_path, const std::string& data_dir) {
    ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!data_dir.empty()) config.data_dir = data_dir;
    return config;
}

std::vector<OhlcBar> training_prefix(const ExperimentConfig& config, const std::string& ticker, bool full_series) {
    auto bars = load_series(config.data_dir / (ticker + ".csv"));
    if (full_series) return bars;
    const auto split = split_series(bars.size(), config.split);
    bars.resize(split.train_end);
    return bars;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Candlestick-language stock forecasting pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* train = app.add_subcommand("train", "Fit per-ticker models on the training phase and write them out");
    train->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    train->add_option("--out", out_dir, "Directory for model artifacts")->default_val("models");

    auto* evaluate = app.add_subcommand("evaluate", "Run the full experiment and write the report");
    evaluate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--out", out_dir, "Report directory")->required();

    std::string ticker;
    std::string data_dir;
    std::size_t k_min = 2;
    std::size_t k_max = 30;
    bool full_series = false;
    auto* sweep = app.add_subcommand("sweep-nw", "Silhouette score for each vocabulary size in a range");
    sweep->add_option("--ticker", ticker, "Ticker symbol (file <data-dir>/<ticker>.csv)")->required();
    sweep->add_option("--min", k_min, "Smallest n_w")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--max", k_max, "Largest n_w")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--config", config_path, "Experiment config supplying data_dir, split and seed");
    sweep->add_option("--data-dir", data_dir, "Directory holding <ticker>.csv");
    sweep->add_flag("--full-series", full_series, "Cluster the whole series instead of the training phase");

    std::size_t n_la = 5;
    double v_fee = 10.0;
    double equity = 10000.0;
    std::string out_file;
    auto* label = app.add_subcommand("label", "Export look-ahead BUY/SELL/HOLD labels as CSV");
    label->add_option("--ticker", ticker, "Ticker symbol (file <data-dir>/<ticker>.csv)")->required();
    label->add_option("--config", config_path, "Experiment config supplying data_dir, n_la, v_fee and e");
    label->add_option("--data-dir", data_dir, "Directory holding <ticker>.csv");
    auto* n_la_opt = label->add_option("--n-la", n_la, "Look-ahead horizon in trading days");
    auto* fee_opt = label->add_option("--fee", v_fee, "Flat fee per transaction");
    auto* equity_opt = label->add_option("--equity", equity, "Initial equity");
    label->add_option("--out", out_file, "Output CSV (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            const auto config = load_config(config_path);
            const auto report = run_experiment(config);
            emit_models(report, out_dir);
            return report_failures(report);
        }
        if (evaluate->parsed()) {
            const auto config = load_config(config_path);
            const auto report = run_experiment(config);
            emit_report(report, out_dir);
            return report_failures(report);
        }
        if (sweep->parsed()) {
            if (k_min > k_max) throw ConfigError("--min exceeds --max");
            const auto config = resolve_config(config_path, data_dir);
            const auto bars = normalize(training_prefix(config, ticker, full_series));
            std::cout << "n_w,silhouette,wcss\n";
            for (std::size_t k = std::max<std::size_t>(k_min, 2); k <= k_max; ++k) {
                KMeansOptions options;
                options.n_w = k;
                options.seed = config.seed;
                options.max_iters = config.kmeans_max_iters;
                const auto codebook = fit_codebook(bars, options);
                const auto words = assign_words(bars, codebook);
                char line[96];
                std::snprintf(line, sizeof(line), "%zu,%.6f,%.9g\n", k, silhouette_score(bars, words, codebook),
                              within_cluster_sum_of_squares(bars, words, codebook));
                std::cout << line;
            }
            return kExitOk;
        }
        if (label->parsed()) {
            const auto config = resolve_config(config_path, data_dir);
            LabelingParams params{config.params.n_la, config.v_fee, config.equity};
            if (*n_la_opt) params.n_la = n_la;
            if (*fee_opt) params.v_fee = v_fee;
            if (*equity_opt) params.equity = equity;
            const auto bars = load_series(config.data_dir / (ticker + ".csv"));
            const auto labels = label_days(closes_of(bars), params);
            if (out_file.empty()) {
                write_labels(std::cout, bars, labels);
            } else {
                std::ofstream out(out_file);
                if (!out) throw DataError("cannot write " + out_file);
                write_labels(out, bars, labels);
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitOk;
}
