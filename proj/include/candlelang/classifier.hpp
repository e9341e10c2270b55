#pragma once

#include "candlelang/embedding.hpp"
#include "candlelang/labeler.hpp"
#include "candlelang/lexicon.hpp"
#include "candlelang/market_data.hpp"
#include "candlelang/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace candlelang {

enum class FeatureKind { Basic, Context };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);

/// Per-day feature rows with their target actions.
struct FeatureMatrix {
    Matrix rows;
    std::vector<Action> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dim() const noexcept { return rows.cols(); }
};

struct ContextParams {
    std::size_t n_m = 2;  // previous days added to the current one
};

/// Rows are (H/O, L/O, C/O) for the labeled prefix of `bars`.
FeatureMatrix build_basic_features(std::span<const NormalizedBar> bars, std::span<const Action> labels);

/// Sum of the word vectors of day t and its n_m predecessors.
std::vector<double> context_vector(std::span<const WordId> words, const EmbeddingMatrix& wm, std::size_t t,
                                   std::size_t n_m);

/// One row per labeled day t >= n_m; row count is labels.size() - n_m.
FeatureMatrix build_context_features(std::span<const WordId> words, const EmbeddingMatrix& wm,
                                     std::span<const Action> labels, const ContextParams& ctx);

struct SoftmaxConfig {
    double l2_lambda = 1e-3;
    std::size_t epochs = 500;
    double learning_rate = 0.1;
    std::int64_t seed = 0;
    /// Rescale features to zero mean / unit variance before fitting; the
    /// transform is stored in the model and applied by predict().
    bool standardize = true;
};

/// Three-class (BUY, SELL, HOLD) softmax regression.
struct SoftmaxModel {
    Matrix weights;  // 3 x feature_dim
    std::array<double, kActionCount> bias{};
    double l2_lambda = 0.0;
    std::vector<double> feature_mean;   // empty or feature_dim
    std::vector<double> feature_scale;  // empty or feature_dim
    FeatureKind kind = FeatureKind::Context;

    std::size_t feature_dim() const noexcept { return weights.cols(); }
};

struct SoftmaxObjective {
    double loss = 0.0;
    Matrix grad_weights;
    std::array<double, kActionCount> grad_bias{};
};

/// Mean cross-entropy over `data` plus l2_lambda * ||weights||^2 (bias is not
/// penalized), with its analytic gradient. Rows are used as given.
SoftmaxObjective softmax_objective(const Matrix& weights, const std::array<double, kActionCount>& bias,
                                   const FeatureMatrix& data, double l2_lambda);

struct SoftmaxTraining {
    SoftmaxModel model;
    std::vector<double> epoch_losses;  // objective after each step
};

/// Full-batch gradient descent with a fixed step; the L2 penalty is applied
/// through its proximal map. A single-class training set is allowed.
SoftmaxTraining train_softmax_traced(const FeatureMatrix& features, const SoftmaxConfig& config,
                                     FeatureKind kind = FeatureKind::Context);
SoftmaxModel train_softmax(const FeatureMatrix& features, const SoftmaxConfig& config,
                           FeatureKind kind = FeatureKind::Context);

std::array<double, kActionCount> softmax(const std::array<double, kActionCount>& logits);

/// Highest-probability class; ties go to the lower action code.
Action argmax(const std::array<double, kActionCount>& values);

std::array<double, kActionCount> logits(const SoftmaxModel& model, std::span<const double> feature_row);

struct Prediction {
    std::array<double, kActionCount> probabilities{};
    Action action = Action::Hold;
};

/// Throws std::invalid_argument on a row-width mismatch.
Prediction predict(const SoftmaxModel& model, std::span<const double> feature_row);

nlohmann::json to_json(const SoftmaxModel& model);
SoftmaxModel softmax_model_from_json(const nlohmann::json& j);

}  // namespace candlelang
