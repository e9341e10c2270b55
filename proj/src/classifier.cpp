#include "candlelang/classifier.hpp"

#include "candlelang/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace candlelang {

namespace {

constexpr std::size_t kClasses = kActionCount;

std::array<double, kClasses> raw_logits(const Matrix& weights, const std::array<double, kClasses>& bias,
                                        std::span<const double> row) {
    std::array<double, kClasses> out = bias;
    for (std::size_t k = 0; k < kClasses; ++k) {
        const auto w = weights.row(k);
        for (std::size_t d = 0; d < row.size(); ++d) out[k] += w[d] * row[d];
    }
    return out;
}

}  // namespace

std::string_view to_string(FeatureKind kind) { return kind == FeatureKind::Basic ? "basic" : "context"; }

FeatureKind feature_kind_from_string(std::string_view text) {
    if (text == "basic") return FeatureKind::Basic;
    if (text == "context") return FeatureKind::Context;
    throw std::invalid_argument("unknown feature kind '" + std::string(text) + "'");
}

FeatureMatrix build_basic_features(std::span<const NormalizedBar> bars, std::span<const Action> labels) {
    if (labels.empty()) throw std::invalid_argument("build_basic_features: no labels");
    if (bars.size() < labels.size()) throw std::invalid_argument("build_basic_features: fewer bars than labels");

    FeatureMatrix fm{Matrix(labels.size(), 3), {labels.begin(), labels.end()}};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        fm.rows(i, 0) = bars[i].h_ratio;
        fm.rows(i, 1) = bars[i].l_ratio;
        fm.rows(i, 2) = bars[i].c_ratio;
    }
    return fm;
}

std::vector<double> context_vector(std::span<const WordId> words, const EmbeddingMatrix& wm, std::size_t t,
                                   std::size_t n_m) {
    if (t >= words.size() || t < n_m) throw std::invalid_argument("context_vector: day outside context range");
    std::vector<double> cv(wm.n_v(), 0.0);
    for (std::size_t k = t - n_m; k <= t; ++k) {
        if (words[k] >= wm.n_w()) throw std::invalid_argument("context_vector: word id out of range");
        const auto v = wm.vector(words[k]);
        for (std::size_t d = 0; d < cv.size(); ++d) cv[d] += v[d];
    }
    return cv;
}

FeatureMatrix build_context_features(std::span<const WordId> words, const EmbeddingMatrix& wm,
                                     std::span<const Action> labels, const ContextParams& ctx) {
    if (words.size() < labels.size()) throw std::invalid_argument("build_context_features: fewer words than labels");
    if (labels.size() <= ctx.n_m) {
        throw std::invalid_argument("build_context_features: " + std::to_string(labels.size()) +
                                    " labeled days leave no row for n_m=" + std::to_string(ctx.n_m));
    }
    const std::size_t n_rows = labels.size() - ctx.n_m;
    FeatureMatrix fm{Matrix(n_rows, wm.n_v()), {}};
    fm.labels.reserve(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::size_t t = r + ctx.n_m;
        const auto cv = context_vector(words, wm, t, ctx.n_m);
        std::copy(cv.begin(), cv.end(), fm.rows.row(r).begin());
        fm.labels.push_back(labels[t]);
    }
    return fm;
}

SoftmaxObjective softmax_objective(const Matrix& weights, const std::array<double, kClasses>& bias,
                                   const FeatureMatrix& data, double l2_lambda) {
    if (data.size() == 0) throw std::invalid_argument("softmax: empty training set");
    if (weights.rows() != kClasses || weights.cols() != data.dim()) {
        throw std::invalid_argument("softmax: weight shape does not match features");
    }
    SoftmaxObjective obj;
    obj.grad_weights = Matrix(kClasses, data.dim());
    const double scale = 1.0 / static_cast<double>(data.size());

    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.rows.row(i);
        auto probs = softmax(raw_logits(weights, bias, row));
        const auto target = static_cast<std::size_t>(data.labels[i]);
        obj.loss -= scale * std::log(std::max(probs[target], 1e-300));
        probs[target] -= 1.0;
        for (std::size_t k = 0; k < kClasses; ++k) {
            obj.grad_bias[k] += scale * probs[k];
            auto g = obj.grad_weights.row(k);
            for (std::size_t d = 0; d < row.size(); ++d) g[d] += scale * probs[k] * row[d];
        }
    }
    for (std::size_t k = 0; k < kClasses; ++k) {
        for (std::size_t d = 0; d < data.dim(); ++d) {
            const double w = weights(k, d);
            obj.loss += l2_lambda * w * w;
            obj.grad_weights(k, d) += 2.0 * l2_lambda * w;
        }
    }
    return obj;
}

SoftmaxTraining train_softmax_traced(const FeatureMatrix& features, const SoftmaxConfig& config, FeatureKind kind) {
    if (features.size() == 0 || features.dim() == 0) throw std::invalid_argument("train_softmax: empty training set");
    if (features.rows.rows() != features.size()) throw std::invalid_argument("train_softmax: rows/labels mismatch");
    if (config.l2_lambda < 0.0) throw std::invalid_argument("train_softmax: l2_lambda must be >= 0");
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("train_softmax: learning rate must be positive");

    const std::size_t dim = features.dim();
    SoftmaxTraining result;
    auto& model = result.model;
    model.kind = kind;
    model.l2_lambda = config.l2_lambda;

    const FeatureMatrix* data = &features;
    FeatureMatrix standardized;
    if (config.standardize) {
        model.feature_mean.assign(dim, 0.0);
        model.feature_scale.assign(dim, 1.0);
        const double n = static_cast<double>(features.size());
        for (std::size_t i = 0; i < features.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) model.feature_mean[d] += features.rows(i, d) / n;
        }
        for (std::size_t d = 0; d < dim; ++d) {
            double var = 0.0;
            for (std::size_t i = 0; i < features.size(); ++i) {
                const double dev = features.rows(i, d) - model.feature_mean[d];
                var += dev * dev / n;
            }
            const double sd = std::sqrt(var);
            if (sd > 1e-12) model.feature_scale[d] = sd;
        }
        standardized = features;
        for (std::size_t i = 0; i < features.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                standardized.rows(i, d) = (features.rows(i, d) - model.feature_mean[d]) / model.feature_scale[d];
            }
        }
        data = &standardized;
    }

    std::mt19937_64 rng(static_cast<std::uint64_t>(config.seed));
    std::uniform_real_distribution<double> uniform(-1e-3, 1e-3);
    model.weights = Matrix(kClasses, dim);
    for (auto& w : model.weights.values()) w = uniform(rng);

    // Cross-entropy takes an explicit gradient step; the L2 term is applied as
    // its proximal map, which stays stable for arbitrarily large lambda.
    const double shrink = 1.0 / (1.0 + 2.0 * config.learning_rate * config.l2_lambda);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto obj = softmax_objective(model.weights, model.bias, *data, 0.0);
        for (std::size_t k = 0; k < kClasses; ++k) {
            model.bias[k] -= config.learning_rate * obj.grad_bias[k];
            for (std::size_t d = 0; d < dim; ++d) {
                model.weights(k, d) = shrink * (model.weights(k, d) - config.learning_rate * obj.grad_weights(k, d));
            }
        }
        result.epoch_losses.push_back(softmax_objective(model.weights, model.bias, *data, config.l2_lambda).loss);
    }
    return result;
}

SoftmaxModel train_softmax(const FeatureMatrix& features, const SoftmaxConfig& config, FeatureKind kind) {
    return train_softmax_traced(features, config, kind).model;
}

std::array<double, kClasses> softmax(const std::array<double, kClasses>& logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::array<double, kClasses> p{};
    double total = 0.0;
    for (std::size_t k = 0; k < kClasses; ++k) {
        p[k] = std::exp(logits[k] - top);
        total += p[k];
    }
    for (auto& v : p) v /= total;
    return p;
}

Action argmax(const std::array<double, kClasses>& values) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kClasses; ++k) {
        if (values[k] > values[best]) best = k;
    }
    return static_cast<Action>(best);
}

std::array<double, kClasses> logits(const SoftmaxModel& model, std::span<const double> feature_row) {
    if (feature_row.size() != model.feature_dim()) {
        throw std::invalid_argument("predict: feature row has width " + std::to_string(feature_row.size()) +
                                    ", model expects " + std::to_string(model.feature_dim()));
    }
    if (model.feature_mean.empty()) return raw_logits(model.weights, model.bias, feature_row);
    std::vector<double> x(feature_row.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        x[d] = (feature_row[d] - model.feature_mean[d]) / model.feature_scale[d];
    }
    return raw_logits(model.weights, model.bias, x);
}

Prediction predict(const SoftmaxModel& model, std::span<const double> feature_row) {
    Prediction p;
    p.probabilities = softmax(logits(model, feature_row));
    p.action = argmax(p.probabilities);
    return p;
}

nlohmann::json to_json(const SoftmaxModel& model) {
    nlohmann::json weights = nlohmann::json::array();
    for (std::size_t k = 0; k < kClasses; ++k) {
        const auto r = model.weights.row(k);
        weights.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {{"kind", to_string(model.kind)},
            {"feature_dim", model.feature_dim()},
            {"l2_lambda", model.l2_lambda},
            {"weights", std::move(weights)},
            {"bias", model.bias},
            {"feature_mean", model.feature_mean},
            {"feature_scale", model.feature_scale}};
}

SoftmaxModel softmax_model_from_json(const nlohmann::json& j) {
    try {
        SoftmaxModel model;
        model.kind = feature_kind_from_string(j.at("kind").get<std::string>());
        const auto dim = j.at("feature_dim").get<std::size_t>();
        model.l2_lambda = j.at("l2_lambda").get<double>();
        const auto& w = j.at("weights");
        if (w.size() != kClasses) throw DataError("softmax json: expected 3 weight rows");
        model.weights = Matrix(kClasses, dim);
        for (std::size_t k = 0; k < kClasses; ++k) {
            if (w[k].size() != dim) throw DataError("softmax json: weight row width mismatch");
            for (std::size_t d = 0; d < dim; ++d) model.weights(k, d) = w[k][d].get<double>();
        }
        model.bias = j.at("bias").get<std::array<double, kClasses>>();
        model.feature_mean = j.value("feature_mean", std::vector<double>{});
        model.feature_scale = j.value("feature_scale", std::vector<double>{});
        if (model.feature_mean.size() != model.feature_scale.size() ||
            (!model.feature_mean.empty() && model.feature_mean.size() != dim)) {
            throw DataError("softmax json: standardization vectors do not match feature_dim");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("softmax json: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("softmax json: ") + e.what());
    }
}

}  // namespace candlelang
