#pragma once

#include "candlelang/backtest.hpp"
#include "candlelang/classifier.hpp"
#include "candlelang/embedding.hpp"
#include "candlelang/lexicon.hpp"
#include "candlelang/market_data.hpp"
#include "candlelang/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace candlelang {

struct SplitFractions {
    double train = 0.6;
    double test = 0.2;
    double validation = 0.2;
};

/// Day-aligned chronological phases: [0, train_end), [train_end, test_end),
/// [test_end, total).
struct SplitRanges {
    std::size_t train_end = 0;
    std::size_t test_end = 0;
    std::size_t total = 0;
};

/// Throws std::invalid_argument if any phase would be empty.
SplitRanges split_series(std::size_t n_days, const SplitFractions& fractions);

/// The per-stock tunable hyperparameters.
struct ModelParams {
    std::size_t n_w = 20;
    std::size_t l_s = 5;
    std::size_t n_v = 10;
    std::size_t n_ww = 2;
    std::size_t n_m = 2;
    std::size_t n_la = 5;
    double l2_lambda = 1e-3;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Values to try per hyperparameter; an empty list keeps the base value.
struct HyperGrid {
    std::vector<std::size_t> n_w, l_s, n_v, n_ww, n_m, n_la;
    std::vector<double> l2_lambda;

    /// Cartesian product in field order (n_w outermost, l2_lambda innermost).
    std::vector<ModelParams> expand(const ModelParams& base) const;
};

struct ExperimentConfig {
    std::vector<std::string> tickers;
    std::filesystem::path data_dir = ".";
    SplitFractions split;
    ModelParams params;
    double v_fee = 10.0;
    double equity = 10000.0;
    std::int64_t seed = 0;
    std::optional<HyperGrid> grid;

    std::size_t kmeans_max_iters = 300;
    std::size_t embedding_epochs = 50;
    double embedding_learning_rate = 0.025;
    double embedding_min_learning_rate = 1e-4;
    std::size_t softmax_epochs = 500;
    double softmax_learning_rate = 0.1;
    bool standardize_features = true;
    FeatureKind feature_kind = FeatureKind::Context;
    std::size_t threads = 0;  // 0: hardware concurrency
};

/// Throws ConfigError describing the first violated bound.
void validate(const ExperimentConfig& config);

/// Unknown keys are rejected. A relative data_dir is resolved against
/// `base_dir` when one is given.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Everything fitted on a ticker's training phase.
struct TickerModel {
    ModelParams params;
    Codebook codebook;
    EmbeddingConfig embedding_config;
    EmbeddingMatrix embedding;
    SoftmaxModel classifier;
};

TickerModel fit_ticker_model(std::span<const OhlcBar> train_bars, const ModelParams& params,
                             const ExperimentConfig& config);

/// Model actions for days [begin, end) of `history`. Earlier days only
/// supply context words.
std::vector<Action> predict_actions(const TickerModel& model, std::span<const OhlcBar> history, std::size_t begin,
                                    std::size_t end);

nlohmann::json to_json(const TickerModel& model);

struct StrategyOutcome {
    std::string strategy;
    Phase phase = Phase::Test;
    std::size_t window_begin = 0;
    TradeLedger ledger;
};

struct GridCandidate {
    ModelParams params;
    std::optional<double> test_yield;  // empty when the fit failed
    std::string error;
};

struct TickerReport {
    std::string ticker;
    std::vector<Date> dates;
    SplitRanges split;
    std::optional<TickerModel> model;  // the selected model
    std::vector<GridCandidate> grid;
    std::size_t selected_candidate = 0;
    std::vector<StrategyOutcome> outcomes;  // strategy-major within each phase
};

/// Strategy names in report order.
std::vector<std::string> strategy_names(const ExperimentConfig& config);

/// Full protocol for one ticker: split, fit on train (grid-selected by test
/// yield when a grid is configured), then evaluate every strategy on test and
/// validation windows.
TickerReport run_ticker(const std::string& ticker, std::span<const OhlcBar> bars, const ExperimentConfig& config);

struct TickerFailure {
    std::string ticker;
    std::string error;
};

struct MeanYield {
    Phase phase = Phase::Test;
    std::string strategy;
    double mean = 0.0;
};

struct Comparison {
    Phase phase = Phase::Test;
    std::string model;
    std::string baseline;
    WilcoxonResult result;
};

struct PhaseReport {
    ExperimentConfig config;
    std::vector<TickerReport> tickers;  // sorted by symbol
    std::vector<TickerFailure> failures;
    std::vector<YieldReport> yields;
    std::vector<MeanYield> means;
    std::vector<Comparison> comparisons;
};

/// Processes tickers concurrently; per-ticker errors are collected, not
/// thrown. Throws ConfigError for an invalid config.
PhaseReport run_experiment(const ExperimentConfig& config);

/// Adds yields, means and Wilcoxon comparisons derived from `report.tickers`.
void aggregate(PhaseReport& report);

/// Writes yields.csv, yields_test.csv, yields_validation.csv, means.csv,
/// wilcoxon.csv, selection.csv, grid.csv, failures.csv, config.json and
/// per-run ledgers. Throws DataError naming the path on I/O failure.
void emit_report(const PhaseReport& report, const std::filesystem::path& out_dir);

/// Codebook, embedding and classifier JSON per ticker under out_dir/<ticker>/.
void emit_models(const PhaseReport& report, const std::filesystem::path& out_dir);

}  // namespace candlelang
