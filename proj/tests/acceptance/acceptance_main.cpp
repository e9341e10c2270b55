// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional argv[1]: path to the candlelang CLI for the end-to-end
// determinism check (the library path is used otherwise).

#include "candlelang/backtest.hpp"
#include "candlelang/classifier.hpp"
#include "candlelang/corpus.hpp"
#include "candlelang/embedding.hpp"
#include "candlelang/labeler.hpp"
#include "candlelang/lexicon.hpp"
#include "candlelang/pipeline.hpp"
#include "candlelang/stats.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace candlelang;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void run(int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++g_failures;
    std::printf("[%s] %2d %-34s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, a, b, c);
    return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome wilcoxon_regression() {
    const auto a = wilcoxon_from_statistic(2, 50);
    const auto b = wilcoxon_from_statistic(427, 50);
    const auto c = wilcoxon_from_statistic(155, 50);
    const bool ok = std::abs(a.z_score - (-6.135)) <= 0.001 && a.p_one_tailed < 1e-4 &&
                    std::abs(b.p_one_tailed - 0.021) <= 0.001 && c.p_one_tailed < 1e-4;
    return {ok, fmt("z(2)=%.4f p(427)=%.4f p(155)=%.2e", a.z_score, b.p_one_tailed, c.p_one_tailed)};
}

Outcome wilcoxon_constants() {
    const double mean = signed_rank_mean(50);
    const double sd = signed_rank_sd(50);
    return {mean == 637.5 && std::abs(sd - 103.591) <= 0.001, fmt("mean=%.4f sd=%.4f", mean, sd)};
}

Outcome aggregation() {
    const std::vector<double> yields = {102557.08, -2927.03, 1996.82};
    const double m = mean_yield(yields);
    return {std::abs(m - 33875.62) <= 0.01, fmt("mean=%.4f", m)};
}

Outcome labeler_oracle() {
    std::size_t series = 0, mismatches = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto closes = testdata::random_walk_closes(100, 10'000 + seed);
        for (std::size_t n_la : {1u, 5u, 10u}) {
            for (double fee : {0.0, 10.0}) {
                if (label_days(closes, {n_la, fee, 10000.0}) != oracle::label_days(closes, n_la, fee, 10000.0))
                    ++mismatches;
            }
        }
        ++series;
    }
    const double secs = elapsed_since(t0);
    return {mismatches == 0 && secs < 10.0,
            fmt("%.0f series x 6 settings, %.0f mismatches, %.2fs", double(series), double(mismatches), secs)};
}

double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

Outcome gradient_checks() {
    const auto t0 = std::chrono::steady_clock::now();
    const double h = 1e-5;
    std::mt19937_64 rng(606);
    std::normal_distribution<double> g(0.0, 0.5);

    // Skip-gram, n_w=5, n_v=3, 50 pairs.
    std::uniform_int_distribution<WordId> word(0, 4);
    std::vector<SkipGramPair> pairs(50);
    for (auto& p : pairs) p = {word(rng), word(rng)};
    SkipGramModel sg{Matrix(5, 3), Matrix(5, 3)};
    for (auto& v : sg.input.values()) v = g(rng);
    for (auto& v : sg.output.values()) v = g(rng);
    const auto sg_grad = skipgram_gradient(sg, pairs);
    double sg_worst = 0.0;
    for (Matrix SkipGramModel::*which : {&SkipGramModel::input, &SkipGramModel::output}) {
        for (std::size_t i = 0; i < 15; ++i) {
            auto up = sg, down = sg;
            (up.*which).values()[i] += h;
            (down.*which).values()[i] -= h;
            const double num = (skipgram_loss(up, pairs) - skipgram_loss(down, pairs)) / (2 * h);
            sg_worst = std::max(sg_worst, relative_error((sg_grad.*which).values()[i], num));
        }
    }

    // Softmax on 50 rows of 3-dimensional features (the context width for n_v=3).
    FeatureMatrix data{Matrix(50, 3), {}};
    for (auto& v : data.rows.values()) v = g(rng);
    std::uniform_int_distribution<int> cls(0, 2);
    for (int i = 0; i < 50; ++i) data.labels.push_back(static_cast<Action>(cls(rng)));
    Matrix w(3, 3);
    for (auto& v : w.values()) v = g(rng);
    std::array<double, 3> b = {g(rng), g(rng), g(rng)};
    const double lambda = 0.01;
    const auto obj = softmax_objective(w, b, data, lambda);
    double sm_worst = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        Matrix up = w, down = w;
        up.values()[i] += h;
        down.values()[i] -= h;
        const double num =
            (softmax_objective(up, b, data, lambda).loss - softmax_objective(down, b, data, lambda).loss) / (2 * h);
        sm_worst = std::max(sm_worst, relative_error(obj.grad_weights.values()[i], num));
    }
    for (std::size_t k = 0; k < 3; ++k) {
        auto up = b, down = b;
        up[k] += h;
        down[k] -= h;
        const double num =
            (softmax_objective(w, up, data, lambda).loss - softmax_objective(w, down, data, lambda).loss) / (2 * h);
        sm_worst = std::max(sm_worst, relative_error(obj.grad_bias[k], num));
    }
    const double secs = elapsed_since(t0);
    return {sg_worst < 1e-4 && sm_worst < 1e-4 && secs < 5.0,
            fmt("skip-gram max rel err %.2e, softmax %.2e, %.2fs", sg_worst, sm_worst, secs)};
}

Outcome clustering() {
    // k=1 equals the sample mean.
    const auto bars = normalize(testdata::random_walk_bars(1000, 77));
    const auto one = fit_codebook(bars, {.n_w = 1});
    long double sum[3] = {0, 0, 0};
    for (const auto& b : bars) {
        const auto p = to_point(b);
        for (int d = 0; d < 3; ++d) sum[d] += p[d];
    }
    double mean_err = 0.0;
    for (int d = 0; d < 3; ++d)
        mean_err = std::max(mean_err, std::abs(one.centroid(0)[d] - static_cast<double>(sum[d] / bars.size())));

    // Monotone WCSS and silhouette range over 100 seeded runs.
    std::size_t increases = 0, out_of_range = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto run_bars = normalize(testdata::random_walk_bars(250, 2000 + seed));
        double last = std::numeric_limits<double>::infinity();
        KMeansOptions opt{.n_w = 2 + seed % 19, .seed = static_cast<std::int64_t>(seed)};
        opt.on_iteration = [&](std::size_t, double wcss) {
            if (wcss > last) ++increases;
            last = wcss;
        };
        const auto cb = fit_codebook(run_bars, opt);
        const double s = silhouette_score(run_bars, assign_words(run_bars, cb), cb);
        if (!(s >= -1.0 && s <= 1.0)) ++out_of_range;
    }

    // assign_word against a linear scan on 10,000 random bars.
    const auto cb = fit_codebook(bars, {.n_w = 20, .seed = 5});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> hi(1.0, 1.08), lo(0.92, 1.0);
    std::size_t disagreements = 0;
    for (int i = 0; i < 10000; ++i) {
        const NormalizedBar bar{hi(rng), lo(rng), std::uniform_real_distribution<double>(0.95, 1.05)(rng)};
        const auto p = to_point(bar);
        WordId best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (WordId k = 0; k < cb.size(); ++k) {
            double d = 0;
            for (int j = 0; j < 3; ++j) d += (p[j] - cb.centroid(k)[j]) * (p[j] - cb.centroid(k)[j]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        if (assign_word(bar, cb) != best) ++disagreements;
    }
    const bool ok = mean_err <= 1e-12 && increases == 0 && out_of_range == 0 && disagreements == 0;
    std::ostringstream d;
    d << "mean err " << mean_err << ", WCSS increases " << increases << ", silhouette out of range " << out_of_range
      << ", assign mismatches " << disagreements;
    return {ok, d.str()};
}

Outcome softmax_normalization() {
    std::mt19937_64 rng(808);
    std::normal_distribution<double> g(0.0, 2.0);
    std::uniform_int_distribution<std::size_t> dim(1, 12);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    double worst = 0.0;
    std::size_t flips = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        SoftmaxModel model;
        model.weights = Matrix(3, dim(rng));
        for (auto& v : model.weights.values()) v = g(rng);
        for (auto& v : model.bias) v = g(rng);
        std::vector<double> row(model.feature_dim());
        for (auto& v : row) v = g(rng);
        const auto pred = predict(model, row);
        worst = std::max(worst, std::abs(pred.probabilities[0] + pred.probabilities[1] + pred.probabilities[2] - 1.0));
        auto z = logits(model, row);
        const double c = shift(rng);
        for (auto& v : z) v += c;
        if (argmax(softmax(z)) != pred.action) ++flips;
    }
    return {worst <= 1e-9 && flips == 0, fmt("max |sum-1| %.2e, argmax changes %.0f", worst, double(flips))};
}

Outcome backtest_accounting() {
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<int> pick(0, 2);
    double worst = 0.0;
    bool hold_zero = true;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto closes = testdata::random_walk_closes(120, 30'000 + seed);
        std::vector<Action> actions(closes.size());
        for (auto& a : actions) a = static_cast<Action>(pick(rng));
        const auto ledger = simulate(closes, {actions, 10000.0, 10.0});
        // Portfolio value before each trade, marked at the trade price, equals
        // the value after it plus the fee.
        double cash = ledger.initial_cash;
        std::int64_t shares = 0;
        for (const auto& t : ledger.trades) {
            const double before = cash + static_cast<double>(shares) * t.price;
            const double after = t.cash_after + static_cast<double>(t.shares_after) * t.price;
            worst = std::max(worst, std::abs(before - after - t.fee));
            cash = t.cash_after;
            shares = t.shares_after;
        }
        worst = std::max(worst, std::abs(cash - ledger.final_cash));
        if (shares != 0) worst = std::numeric_limits<double>::infinity();

        const std::vector<Action> holds(closes.size(), Action::Hold);
        if (simulate(closes, {holds, 10000.0, 10.0}).yield() != 0.0) hold_zero = false;
    }
    const std::vector<double> hand = {100.0, 110.0};
    const std::vector<Action> hand_actions = {Action::Buy, Action::Sell};
    const double hand_yield = simulate(hand, {hand_actions, 10000.0, 0.0}).yield();
    return {worst <= 1e-6 && hold_zero && hand_yield == 1000.0,
            fmt("max identity residual %.2e, all-HOLD zero %.0f, hand case %.2f", worst, hold_zero ? 1.0 : 0.0,
                hand_yield)};
}

Outcome baselines() {
    std::size_t ma_mismatch = 0, macd_mismatch = 0, signals = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto closes = testdata::random_walk_closes(1000, 40'000 + seed);
        const auto ma = ma_crossover(closes, 50, 100);
        const auto md = macd(closes, 12, 26, 9);
        if (ma != oracle::ma_crossover(closes, 50, 100)) ++ma_mismatch;
        if (md != oracle::macd(closes, 12, 26, 9)) ++macd_mismatch;
        for (const auto& v : {ma, md}) signals += v.size() - std::count(v.begin(), v.end(), Action::Hold);
    }
    const std::vector<double> flat(1000, 123.45);
    bool flat_hold = true;
    for (const auto& v : {ma_crossover(flat, 50, 100), macd(flat, 12, 26, 9)})
        flat_hold = flat_hold && std::all_of(v.begin(), v.end(), [](Action a) { return a == Action::Hold; });
    return {ma_mismatch == 0 && macd_mismatch == 0 && flat_hold && signals > 0,
            fmt("MA mismatches %.0f, MACD mismatches %.0f, %.0f signals compared", double(ma_mismatch),
                double(macd_mismatch), double(signals)) +
                (flat_hold ? ", constant series all HOLD" : ", constant series emitted signals")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome end_to_end(const std::string& cli) {
    const fs::path root = fs::temp_directory_path() / "candlelang_acceptance_e2e";
    fs::remove_all(root);
    fs::create_directories(root / "data");
    std::vector<std::string> tickers;
    for (int i = 0; i < 6; ++i) {
        tickers.push_back("SYN" + std::to_string(i));
        write_series(root / "data" / (tickers.back() + ".csv"),
                     testdata::random_walk_bars(600, 50'000 + i, 30.0 + 10 * i, 0.0003 * (i - 2)));
    }
    ExperimentConfig config;
    config.tickers = tickers;
    config.data_dir = root / "data";
    config.seed = 42;
    config.threads = 3;
    {
        std::ofstream out(root / "config.json");
        out << to_json(config).dump(2);
    }

    for (const char* run_dir : {"run_a", "run_b"}) {
        if (!cli.empty()) {
            const std::string cmd = "\"" + cli + "\" evaluate --config \"" + (root / "config.json").string() +
                                    "\" --out \"" + (root / run_dir).string() + "\"";
            if (std::system(cmd.c_str()) != 0) return {false, "evaluate exited nonzero"};
        } else {
            emit_report(run_experiment(load_config(root / "config.json")), root / run_dir);
        }
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "run_a")) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const auto other = root / "run_b" / fs::relative(entry.path(), root / "run_a");
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    std::size_t files_b = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "run_b")) files_b += entry.is_regular_file();

    // Full pipeline on one 2,000-day synthetic ticker with default settings.
    const auto bars = testdata::random_walk_bars(2000, 60'000, 50.0, 0.0002);
    ExperimentConfig single;
    single.tickers = {"LONG"};
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = run_ticker("LONG", bars, single);
    const double secs = elapsed_since(t0);
    fs::remove_all(root);

    const bool ok = files > 0 && differing == 0 && files == files_b && report.outcomes.size() == 8 && secs < 60.0;
    return {ok, fmt("%.0f report files, %.0f differ; 2000-day ticker in %.2fs", double(files), double(differing), secs) +
                    (cli.empty() ? " (library)" : " (cli)")};
}

Outcome small_n_wilcoxon() {
    std::mt19937_64 rng(1212);
    std::uniform_int_distribution<std::size_t> n_pick(6, 10);
    std::normal_distribution<double> g;
    double worst = 0.0;
    std::size_t over = 0;
    std::size_t worst_n = 0;
    for (int dataset = 0; dataset < 100; ++dataset) {
        const std::size_t n = n_pick(rng);
        std::vector<double> a(n), b(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = g(rng);
            b[i] = g(rng);
            d[i] = a[i] - b[i];
        }
        const auto r = wilcoxon_signed_rank(a, b);
        const double exact = oracle::exact_signed_rank_p(oracle::abs_ranks(d), r.w_statistic);
        const double gap = std::abs(r.p_one_tailed - exact);
        if (gap > 0.03) ++over;
        if (gap > worst) {
            worst = gap;
            worst_n = n;
        }
    }
    return {over == 0, fmt("max |p_normal - p_exact| %.4f (N=%.0f), %.0f of 100 datasets beyond 0.03", worst,
                           double(worst_n), double(over))};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    run(1, "wilcoxon known statistics", wilcoxon_regression);
    run(2, "wilcoxon null moments", wilcoxon_constants);
    run(3, "mean yield aggregation", aggregation);
    std::printf("[N/A ]  4 %-34s %s\n", "historical yield tables",
                "not reproducible without the original date ranges and tuned hyperparameters; covered by 5-12");
    run(5, "labeler vs brute force", labeler_oracle);
    run(6, "gradient checks", gradient_checks);
    run(7, "clustering properties", clustering);
    run(8, "softmax normalization", softmax_normalization);
    run(9, "backtest accounting", backtest_accounting);
    run(10, "baseline crossings vs oracle", baselines);
    run(11, "end-to-end determinism and speed", [&] { return end_to_end(cli); });
    run(12, "small-N wilcoxon vs exact", small_n_wilcoxon);
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
