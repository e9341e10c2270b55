#pragma once

#include "candlelang/corpus.hpp"
#include "candlelang/lexicon.hpp"
#include "candlelang/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace candlelang {

struct EmbeddingConfig {
    std::size_t n_v = 10;   // embedding width
    std::size_t n_ww = 2;   // context radius in words
    std::size_t epochs = 50;
    double learning_rate = 0.025;
    double min_learning_rate = 1e-4;  // linear decay target
    std::int64_t seed = 0;
};

/// The n_w x n_v word-vector matrix. Row i is the hidden activation for a
/// one-hot input of word i.
struct EmbeddingMatrix {
    Matrix weights;

    std::size_t n_w() const noexcept { return weights.rows(); }
    std::size_t n_v() const noexcept { return weights.cols(); }
    std::span<const double> vector(WordId id) const { return weights.row(id); }

    friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

struct SkipGramPair {
    WordId center = 0;
    WordId context = 0;
};

/// Skip-gram network with a linear hidden layer and a full softmax output
/// layer. Both matrices are n_w x n_v; `output` row j scores context word j.
struct SkipGramModel {
    Matrix input;
    Matrix output;
};

struct SkipGramTraining {
    SkipGramModel model;
    double initial_loss = 0.0;
    /// Mean loss over all training pairs, measured after each epoch.
    std::vector<double> epoch_losses;
};

/// Every (center, context) pair with |offset| <= n_ww inside each sentence.
std::vector<SkipGramPair> skipgram_pairs(const SentenceMatrix& sentences, std::size_t n_ww);

/// Mean negative log-likelihood of the context words over `pairs`.
double skipgram_loss(const SkipGramModel& model, std::span<const SkipGramPair> pairs);

/// Analytic gradient of skipgram_loss, same shape as the model.
SkipGramModel skipgram_gradient(const SkipGramModel& model, std::span<const SkipGramPair> pairs);

/// Softmax distribution over context words given a center word.
std::vector<double> context_distribution(const SkipGramModel& model, WordId center);

/// Plain SGD over shuffled pairs with linearly decaying step size.
/// Throws std::invalid_argument on an empty corpus, out-of-range ids, or a
/// nonpositive learning rate.
SkipGramTraining train_skipgram(const SentenceMatrix& sentences, std::size_t n_w, const EmbeddingConfig& config);

EmbeddingMatrix train_embeddings(const SentenceMatrix& sentences, std::size_t n_w, const EmbeddingConfig& config);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Word (other than a, b, c) whose vector is most cosine-similar to
/// vec(a) - vec(b) + vec(c). Requires n_w > 3.
WordId vector_arithmetic_probe(const EmbeddingMatrix& wm, WordId a, WordId b, WordId c);

nlohmann::json to_json(const EmbeddingMatrix& wm, const EmbeddingConfig& config);
EmbeddingMatrix embedding_from_json(const nlohmann::json& j);

}  // namespace candlelang
