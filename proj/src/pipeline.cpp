#include "candlelang/pipeline.hpp"

#include "candlelang/corpus.hpp"
#include "candlelang/errors.hpp"
#include "candlelang/labeler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

namespace candlelang {

namespace fs = std::filesystem;

namespace {

constexpr const char* kBuyAndHold = "buy_and_hold";
constexpr const char* kMaCrossover = "ma_50_100";
constexpr const char* kMacd = "macd";

std::string model_strategy_name(FeatureKind kind) { return kind == FeatureKind::Context ? "w2v" : "basic"; }

std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, value);
    return buf;
}

std::string money(double value) { return fmt("%.6f", value); }

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw DataError("write failed for " + path.string());
}

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

template <typename T>
std::vector<T> take_list(const nlohmann::json& grid, const char* key) {
    if (!grid.contains(key)) return {};
    auto values = grid.at(key).get<std::vector<T>>();
    if (values.empty()) throw ConfigError(std::string("grid.") + key + " must not be empty");
    return values;
}

void check_params(const ModelParams& p, const std::string& where) {
    auto fail = [&](const std::string& what) { throw ConfigError(where + ": " + what); };
    if (p.n_w < 2) fail("n_w must be >= 2");
    if (p.l_s < 2) fail("l_s must be >= 2");
    if (p.n_v < 1) fail("n_v must be >= 1");
    if (p.n_ww < 1) fail("n_ww must be >= 1");
    if (p.n_la < 1) fail("n_la must be >= 1");
    if (!(p.l2_lambda >= 0.0) || !std::isfinite(p.l2_lambda)) fail("l2_lambda must be finite and >= 0");
}

double phase_yield(const TickerReport& report, const std::string& strategy, Phase phase) {
    for (const auto& o : report.outcomes) {
        if (o.strategy == strategy && o.phase == phase) return o.ledger.yield();
    }
    throw std::logic_error("missing outcome " + strategy);
}

}  // namespace

SplitRanges split_series(std::size_t n_days, const SplitFractions& fractions) {
    SplitRanges r;
    r.total = n_days;
    r.train_end = static_cast<std::size_t>(std::floor(static_cast<double>(n_days) * fractions.train));
    r.test_end = r.train_end + static_cast<std::size_t>(std::floor(static_cast<double>(n_days) * fractions.test));
    if (r.train_end == 0 || r.test_end <= r.train_end || r.test_end >= n_days) {
        throw std::invalid_argument("split of " + std::to_string(n_days) + " days leaves an empty phase");
    }
    return r;
}

std::vector<ModelParams> HyperGrid::expand(const ModelParams& base) const {
    auto or_base = []<typename T>(const std::vector<T>& values, T fallback) {
        return values.empty() ? std::vector<T>{fallback} : values;
    };
    std::vector<ModelParams> out;
    for (auto a : or_base(n_w, base.n_w))
        for (auto b : or_base(l_s, base.l_s))
            for (auto c : or_base(n_v, base.n_v))
                for (auto d : or_base(n_ww, base.n_ww))
                    for (auto e : or_base(n_m, base.n_m))
                        for (auto f : or_base(n_la, base.n_la))
                            for (auto g : or_base(l2_lambda, base.l2_lambda)) out.push_back({a, b, c, d, e, f, g});
    return out;
}

void validate(const ExperimentConfig& config) {
    const auto& s = config.split;
    if (!(s.train > 0.0 && s.test > 0.0 && s.validation > 0.0)) throw ConfigError("split fractions must be positive");
    if (std::abs(s.train + s.test + s.validation - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    check_params(config.params, "config");
    if (config.grid) {
        for (const auto& p : config.grid->expand(config.params)) check_params(p, "grid");
    }
    if (!(config.v_fee >= 0.0) || !std::isfinite(config.v_fee)) throw ConfigError("v_fee must be >= 0");
    if (!(config.equity > 0.0) || !std::isfinite(config.equity)) throw ConfigError("e must be > 0");
    if (config.kmeans_max_iters < 1) throw ConfigError("kmeans_max_iters must be >= 1");
    if (config.embedding_epochs < 1 || config.softmax_epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(config.embedding_learning_rate > 0.0) || !(config.softmax_learning_rate > 0.0) ||
        !(config.embedding_min_learning_rate > 0.0)) {
        throw ConfigError("learning rates must be positive");
    }
    std::set<std::string> seen;
    for (const auto& t : config.tickers) {
        if (t.empty() || t.find('/') != std::string::npos) throw ConfigError("invalid ticker symbol '" + t + "'");
        if (!seen.insert(t).second) throw ConfigError("duplicate ticker '" + t + "'");
    }
}

ExperimentConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    static const std::set<std::string> known = {
        "tickers", "data_dir", "split", "n_w", "l_s", "n_v", "n_ww", "n_m", "n_la", "l2_lambda", "v_fee", "e",
        "seed", "grid", "kmeans_max_iters", "embedding_epochs", "embedding_learning_rate",
        "embedding_min_learning_rate", "softmax_epochs", "softmax_learning_rate", "standardize_features",
        "feature_kind", "threads"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    ExperimentConfig c;
    try {
        c.tickers = j.value("tickers", std::vector<std::string>{});
        c.data_dir = j.value("data_dir", std::string("."));
        if (c.data_dir.is_relative() && !base_dir.empty()) c.data_dir = base_dir / c.data_dir;
        if (j.contains("split")) {
            const auto split = j.at("split").get<std::vector<double>>();
            if (split.size() != 3) throw ConfigError("split must list train, test and validation fractions");
            c.split = {split[0], split[1], split[2]};
        }
        c.params.n_w = j.value("n_w", c.params.n_w);
        c.params.l_s = j.value("l_s", c.params.l_s);
        c.params.n_v = j.value("n_v", c.params.n_v);
        c.params.n_ww = j.value("n_ww", c.params.n_ww);
        c.params.n_m = j.value("n_m", c.params.n_m);
        c.params.n_la = j.value("n_la", c.params.n_la);
        c.params.l2_lambda = j.value("l2_lambda", c.params.l2_lambda);
        c.v_fee = j.value("v_fee", c.v_fee);
        c.equity = j.value("e", c.equity);
        c.seed = j.value("seed", c.seed);
        c.kmeans_max_iters = j.value("kmeans_max_iters", c.kmeans_max_iters);
        c.embedding_epochs = j.value("embedding_epochs", c.embedding_epochs);
        c.embedding_learning_rate = j.value("embedding_learning_rate", c.embedding_learning_rate);
        c.embedding_min_learning_rate = j.value("embedding_min_learning_rate", c.embedding_min_learning_rate);
        c.softmax_epochs = j.value("softmax_epochs", c.softmax_epochs);
        c.softmax_learning_rate = j.value("softmax_learning_rate", c.softmax_learning_rate);
        c.standardize_features = j.value("standardize_features", c.standardize_features);
        c.feature_kind = feature_kind_from_string(j.value("feature_kind", std::string("context")));
        c.threads = j.value("threads", c.threads);

        if (j.contains("grid") && !j.at("grid").is_null()) {
            const auto& g = j.at("grid");
            static const std::set<std::string> grid_keys = {"n_w", "l_s", "n_v", "n_ww", "n_m", "n_la", "l2_lambda"};
            for (const auto& [key, _] : g.items()) {
                if (!grid_keys.contains(key)) throw ConfigError("unknown grid key '" + key + "'");
            }
            HyperGrid grid;
            grid.n_w = take_list<std::size_t>(g, "n_w");
            grid.l_s = take_list<std::size_t>(g, "l_s");
            grid.n_v = take_list<std::size_t>(g, "n_v");
            grid.n_ww = take_list<std::size_t>(g, "n_ww");
            grid.n_m = take_list<std::size_t>(g, "n_m");
            grid.n_la = take_list<std::size_t>(g, "n_la");
            grid.l2_lambda = take_list<double>(g, "l2_lambda");
            c.grid = std::move(grid);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j = {{"tickers", c.tickers},
                        {"data_dir", c.data_dir.generic_string()},
                        {"split", {c.split.train, c.split.test, c.split.validation}},
                        {"n_w", c.params.n_w},
                        {"l_s", c.params.l_s},
                        {"n_v", c.params.n_v},
                        {"n_ww", c.params.n_ww},
                        {"n_m", c.params.n_m},
                        {"n_la", c.params.n_la},
                        {"l2_lambda", c.params.l2_lambda},
                        {"v_fee", c.v_fee},
                        {"e", c.equity},
                        {"seed", c.seed},
                        {"kmeans_max_iters", c.kmeans_max_iters},
                        {"embedding_epochs", c.embedding_epochs},
                        {"embedding_learning_rate", c.embedding_learning_rate},
                        {"embedding_min_learning_rate", c.embedding_min_learning_rate},
                        {"softmax_epochs", c.softmax_epochs},
                        {"softmax_learning_rate", c.softmax_learning_rate},
                        {"standardize_features", c.standardize_features},
                        {"feature_kind", to_string(c.feature_kind)},
                        {"threads", c.threads}};
    if (c.grid) {
        nlohmann::json g = nlohmann::json::object();
        if (!c.grid->n_w.empty()) g["n_w"] = c.grid->n_w;
        if (!c.grid->l_s.empty()) g["l_s"] = c.grid->l_s;
        if (!c.grid->n_v.empty()) g["n_v"] = c.grid->n_v;
        if (!c.grid->n_ww.empty()) g["n_ww"] = c.grid->n_ww;
        if (!c.grid->n_m.empty()) g["n_m"] = c.grid->n_m;
        if (!c.grid->n_la.empty()) g["n_la"] = c.grid->n_la;
        if (!c.grid->l2_lambda.empty()) g["l2_lambda"] = c.grid->l2_lambda;
        j["grid"] = std::move(g);
    } else {
        j["grid"] = nullptr;
    }
    return j;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

TickerModel fit_ticker_model(std::span<const OhlcBar> train_bars, const ModelParams& params,
                             const ExperimentConfig& config) {
    const auto normalized = normalize(train_bars);
    KMeansOptions km;
    km.n_w = params.n_w;
    km.seed = config.seed;
    km.max_iters = config.kmeans_max_iters;
    auto codebook = fit_codebook(normalized, km);
    const auto words = assign_words(normalized, codebook);

    EmbeddingConfig ec;
    ec.n_v = params.n_v;
    ec.n_ww = params.n_ww;
    ec.epochs = config.embedding_epochs;
    ec.learning_rate = config.embedding_learning_rate;
    ec.min_learning_rate = config.embedding_min_learning_rate;
    ec.seed = config.seed;
    auto embedding = train_embeddings(build_sentences(words, params.l_s), params.n_w, ec);

    const auto closes = closes_of(train_bars);
    const auto labels = label_days(closes, {params.n_la, config.v_fee, config.equity});

    SoftmaxConfig sc;
    sc.l2_lambda = params.l2_lambda;
    sc.epochs = config.softmax_epochs;
    sc.learning_rate = config.softmax_learning_rate;
    sc.seed = config.seed;
    sc.standardize = config.standardize_features;

    const auto features = config.feature_kind == FeatureKind::Context
                              ? build_context_features(words, embedding, labels, {params.n_m})
                              : build_basic_features(normalized, labels);
    auto classifier = train_softmax(features, sc, config.feature_kind);

    return {params, std::move(codebook), ec, std::move(embedding), std::move(classifier)};
}

std::vector<Action> predict_actions(const TickerModel& model, std::span<const OhlcBar> history, std::size_t begin,
                                    std::size_t end) {
    if (begin >= end || end > history.size()) throw std::invalid_argument("predict_actions: bad window");
    const auto normalized = normalize(history.first(end));
    std::vector<Action> actions;
    actions.reserve(end - begin);

    if (model.classifier.kind == FeatureKind::Basic) {
        for (std::size_t t = begin; t < end; ++t) {
            const auto& b = normalized[t];
            const double row[] = {b.h_ratio, b.l_ratio, b.c_ratio};
            actions.push_back(predict(model.classifier, row).action);
        }
        return actions;
    }

    const std::size_t n_m = model.params.n_m;
    if (begin < n_m) throw std::invalid_argument("predict_actions: window starts before n_m days of context");
    const auto words = assign_words(normalized, model.codebook);
    for (std::size_t t = begin; t < end; ++t) {
        actions.push_back(predict(model.classifier, context_vector(words, model.embedding, t, n_m)).action);
    }
    return actions;
}

nlohmann::json to_json(const TickerModel& model) {
    const auto& p = model.params;
    return {{"params",
             {{"n_w", p.n_w},
              {"l_s", p.l_s},
              {"n_v", p.n_v},
              {"n_ww", p.n_ww},
              {"n_m", p.n_m},
              {"n_la", p.n_la},
              {"l2_lambda", p.l2_lambda}}},
            {"codebook", to_json(model.codebook)},
            {"embedding", to_json(model.embedding, model.embedding_config)},
            {"classifier", to_json(model.classifier)}};
}

std::vector<std::string> strategy_names(const ExperimentConfig& config) {
    return {kBuyAndHold, kMaCrossover, kMacd, model_strategy_name(config.feature_kind)};
}

TickerReport run_ticker(const std::string& ticker, std::span<const OhlcBar> bars, const ExperimentConfig& config) {
    TickerReport report;
    report.ticker = ticker;
    report.dates.reserve(bars.size());
    for (const auto& b : bars) report.dates.push_back(b.date);
    report.split = split_series(bars.size(), config.split);
    const auto& split = report.split;
    const auto closes = closes_of(bars);
    const auto train = bars.first(split.train_end);

    auto evaluate_model = [&](const TickerModel& model, std::size_t begin, std::size_t end) {
        const auto actions = predict_actions(model, bars, begin, end);
        return simulate(std::span(closes).subspan(begin, end - begin), {actions, config.equity, config.v_fee});
    };

    const auto candidates =
        config.grid ? config.grid->expand(config.params) : std::vector<ModelParams>{config.params};
    std::optional<double> best_yield;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        GridCandidate candidate{candidates[i], std::nullopt, {}};
        try {
            auto model = fit_ticker_model(train, candidates[i], config);
            const double y = evaluate_model(model, split.train_end, split.test_end).yield();
            candidate.test_yield = y;
            if (!best_yield || y > *best_yield) {
                best_yield = y;
                report.selected_candidate = i;
                report.model = std::move(model);
            }
        } catch (const std::exception& e) {
            if (candidates.size() == 1) throw;
            candidate.error = e.what();
        }
        report.grid.push_back(std::move(candidate));
    }
    if (!report.model) throw std::runtime_error("no grid candidate could be fitted");

    const std::string model_name = model_strategy_name(config.feature_kind);
    for (Phase phase : {Phase::Test, Phase::Validation}) {
        const std::size_t begin = phase == Phase::Test ? split.train_end : split.test_end;
        const std::size_t end = phase == Phase::Test ? split.test_end : split.total;
        const auto window = std::span(closes).subspan(begin, end - begin);
        const auto history = std::span(closes).first(end);

        auto baseline = [&](std::vector<Action> full) {
            const std::vector<Action> sliced(full.begin() + static_cast<std::ptrdiff_t>(begin), full.end());
            return simulate(window, {sliced, config.equity, config.v_fee});
        };

        report.outcomes.push_back({kBuyAndHold, phase, begin, buy_and_hold(window, config.equity, config.v_fee)});
        report.outcomes.push_back({kMaCrossover, phase, begin, baseline(ma_crossover(history, 50, 100))});
        report.outcomes.push_back({kMacd, phase, begin, baseline(macd(history, 12, 26, 9))});
        report.outcomes.push_back({model_name, phase, begin, evaluate_model(*report.model, begin, end)});
    }
    return report;
}

void aggregate(PhaseReport& report) {
    report.yields.clear();
    report.means.clear();
    report.comparisons.clear();
    const auto names = strategy_names(report.config);

    for (Phase phase : {Phase::Test, Phase::Validation}) {
        for (const auto& t : report.tickers) {
            for (const auto& name : names) report.yields.push_back({t.ticker, name, phase, phase_yield(t, name, phase)});
        }
    }
    if (report.tickers.empty()) return;

    for (Phase phase : {Phase::Test, Phase::Validation}) {
        std::vector<std::vector<double>> per_strategy(names.size());
        for (const auto& t : report.tickers) {
            for (std::size_t s = 0; s < names.size(); ++s) per_strategy[s].push_back(phase_yield(t, names[s], phase));
        }
        for (std::size_t s = 0; s < names.size(); ++s) report.means.push_back({phase, names[s], mean_yield(per_strategy[s])});

        // Model (last strategy) against each baseline; skipped when the test
        // is undefined (too few tickers or identical yields).
        for (std::size_t s = 0; s + 1 < names.size(); ++s) {
            try {
                report.comparisons.push_back(
                    {phase, names.back(), names[s], wilcoxon_signed_rank(per_strategy.back(), per_strategy[s])});
            } catch (const std::invalid_argument&) {
            }
        }
    }
}

PhaseReport run_experiment(const ExperimentConfig& config) {
    validate(config);
    if (!fs::is_directory(config.data_dir)) throw ConfigError("data_dir " + config.data_dir.string() + " is not a directory");

    PhaseReport report;
    report.config = config;
    auto tickers = config.tickers;
    std::sort(tickers.begin(), tickers.end());

    std::vector<std::optional<TickerReport>> results(tickers.size());
    std::vector<std::string> errors(tickers.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < tickers.size(); i = next++) {
            try {
                const auto bars = load_series(config.data_dir / (tickers[i] + ".csv"));
                results[i] = run_ticker(tickers[i], bars, config);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    std::size_t n_threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, std::max<std::size_t>(tickers.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
        worker();
    }

    for (std::size_t i = 0; i < tickers.size(); ++i) {
        if (results[i]) {
            report.tickers.push_back(std::move(*results[i]));
        } else {
            report.failures.push_back({tickers[i], errors[i]});
        }
    }
    aggregate(report);
    return report;
}

void emit_report(const PhaseReport& report, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir / "ledgers", ec);
    if (ec) throw DataError("cannot create " + (out_dir / "ledgers").string() + ": " + ec.message());
    const auto names = strategy_names(report.config);

    {
        const auto path = out_dir / "yields.csv";
        auto out = open_output(path);
        out << "ticker,strategy,phase,yield\n";
        for (const auto& y : report.yields) {
            out << y.ticker << ',' << y.strategy << ',' << to_string(y.phase) << ',' << money(y.yield) << '\n';
        }
        close_output(out, path);
    }

    for (Phase phase : {Phase::Test, Phase::Validation}) {
        const auto path = out_dir / ("yields_" + std::string(to_string(phase)) + ".csv");
        auto out = open_output(path);
        out << "ticker";
        for (const auto& n : names) out << ',' << n;
        out << '\n';
        for (const auto& t : report.tickers) {
            out << t.ticker;
            for (const auto& n : names) out << ',' << money(phase_yield(t, n, phase));
            out << '\n';
        }
        close_output(out, path);
    }

    {
        const auto path = out_dir / "means.csv";
        auto out = open_output(path);
        out << "phase,strategy,mean_yield\n";
        for (const auto& m : report.means) out << to_string(m.phase) << ',' << m.strategy << ',' << money(m.mean) << '\n';
        close_output(out, path);
    }

    {
        const auto path = out_dir / "wilcoxon.csv";
        auto out = open_output(path);
        out << "comparison,W,N,z,p_one_tailed,p_two_tailed,median_difference\n";
        for (const auto& c : report.comparisons) {
            const auto& r = c.result;
            out << to_string(c.phase) << ':' << c.model << "_vs_" << c.baseline << ',' << fmt("%.1f", r.w_statistic)
                << ',' << r.n_effective << ',' << fmt("%.6f", r.z_score) << ',' << fmt("%.6e", r.p_one_tailed) << ','
                << fmt("%.6e", r.p_two_tailed) << ',' << money(r.median_difference) << '\n';
        }
        close_output(out, path);
    }

    {
        const auto path = out_dir / "selection.csv";
        auto out = open_output(path);
        out << "ticker,n_w,l_s,n_v,n_ww,n_m,n_la,l2_lambda,test_yield\n";
        for (const auto& t : report.tickers) {
            const auto& c = t.grid[t.selected_candidate];
            const auto& p = c.params;
            out << t.ticker << ',' << p.n_w << ',' << p.l_s << ',' << p.n_v << ',' << p.n_ww << ',' << p.n_m << ','
                << p.n_la << ',' << fmt("%.10g", p.l2_lambda) << ',' << money(c.test_yield.value_or(0.0)) << '\n';
        }
        close_output(out, path);
    }

    {
        const auto path = out_dir / "grid.csv";
        auto out = open_output(path);
        out << "ticker,candidate,n_w,l_s,n_v,n_ww,n_m,n_la,l2_lambda,test_yield,selected,error\n";
        for (const auto& t : report.tickers) {
            for (std::size_t i = 0; i < t.grid.size(); ++i) {
                const auto& c = t.grid[i];
                const auto& p = c.params;
                out << t.ticker << ',' << i << ',' << p.n_w << ',' << p.l_s << ',' << p.n_v << ',' << p.n_ww << ','
                    << p.n_m << ',' << p.n_la << ',' << fmt("%.10g", p.l2_lambda) << ','
                    << (c.test_yield ? money(*c.test_yield) : std::string()) << ','
                    << (i == t.selected_candidate ? 1 : 0) << ',' << csv_escape(c.error) << '\n';
            }
        }
        close_output(out, path);
    }

    {
        const auto path = out_dir / "failures.csv";
        auto out = open_output(path);
        out << "ticker,error\n";
        for (const auto& f : report.failures) out << f.ticker << ',' << csv_escape(f.error) << '\n';
        close_output(out, path);
    }

    {
        const auto path = out_dir / "config.json";
        auto out = open_output(path);
        out << to_json(report.config).dump(2) << '\n';
        close_output(out, path);
    }

    for (const auto& t : report.tickers) {
        for (const auto& o : t.outcomes) {
            const auto path =
                out_dir / "ledgers" / (t.ticker + "_" + o.strategy + "_" + std::string(to_string(o.phase)) + ".csv");
            auto out = open_output(path);
            write_ledger(out, o.ledger, std::span(t.dates).subspan(o.window_begin));
            close_output(out, path);
        }
    }
}

void emit_models(const PhaseReport& report, const fs::path& out_dir) {
    for (const auto& t : report.tickers) {
        if (!t.model) continue;
        const auto dir = out_dir / t.ticker;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
        const auto j = to_json(*t.model);
        for (const char* part : {"codebook", "embedding", "classifier"}) {
            const auto path = dir / (std::string(part) + ".json");
            auto out = open_output(path);
            out << j.at(part).dump(2) << '\n';
            close_output(out, path);
        }
        const auto path = dir / "params.json";
        auto out = open_output(path);
        out << j.at("params").dump(2) << '\n';
        close_output(out, path);
    }
}

}  // namespace candlelang
