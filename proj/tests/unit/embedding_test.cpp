#include "candlelang/embedding.hpp"
#include "candlelang/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace candlelang;

namespace {

SkipGramModel random_model(std::size_t n_w, std::size_t n_v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.5);
    SkipGramModel m{Matrix(n_w, n_v), Matrix(n_w, n_v)};
    for (auto& v : m.input.values()) v = g(rng);
    for (auto& v : m.output.values()) v = g(rng);
    return m;
}

double max_relative_error(const Matrix& analytic, Matrix& param, SkipGramModel& model,
                          std::span<const SkipGramPair> pairs) {
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < param.rows(); ++i) {
        for (std::size_t j = 0; j < param.cols(); ++j) {
            const double saved = param(i, j);
            param(i, j) = saved + h;
            const double up = skipgram_loss(model, pairs);
            param(i, j) = saved - h;
            const double down = skipgram_loss(model, pairs);
            param(i, j) = saved;
            const double numeric = (up - down) / (2 * h);
            const double a = analytic(i, j);
            worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
        }
    }
    return worst;
}

}  // namespace

TEST(Embedding, PairsStayInsideSentences) {
    const std::vector<WordId> words = {0, 1, 2, 3};
    const auto pairs = skipgram_pairs(build_sentences(words, 2), 5);
    // Sentences [0,1], [1,2], [2,3] each give two pairs; no 0-2 pair.
    ASSERT_EQ(pairs.size(), 6u);
    for (const auto& p : pairs) EXPECT_EQ(std::abs(int(p.center) - int(p.context)), 1);
    EXPECT_EQ(skipgram_pairs(build_sentences(words, 4), 1).size(), 6u);
    EXPECT_TRUE(skipgram_pairs(build_sentences(words, 1), 2).empty());
}

TEST(Embedding, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<WordId> w(0, 4);
    std::vector<SkipGramPair> pairs(50);
    for (auto& p : pairs) p = {w(rng), w(rng)};
    auto model = random_model(5, 3, 4);
    const auto grad = skipgram_gradient(model, pairs);
    EXPECT_LT(max_relative_error(grad.input, model.input, model, pairs), 1e-4);
    EXPECT_LT(max_relative_error(grad.output, model.output, model, pairs), 1e-4);
}

TEST(Embedding, LearnsCooccurrence) {
    // A=0 only next to B=1 and C=2 only next to D=3, apart from the single
    // block boundary.
    const EmbeddingConfig config{.n_v = 4, .n_ww = 1, .epochs = 30, .learning_rate = 0.05, .seed = 3};
    std::vector<WordId> block_words;
    for (int i = 0; i < 60; ++i) block_words.insert(block_words.end(), {0, 1, 0, 1});
    for (int i = 0; i < 60; ++i) block_words.insert(block_words.end(), {2, 3, 2, 3});
    const auto trained = train_skipgram(build_sentences(block_words, 4), 4, config);
    const auto from_a = context_distribution(trained.model, 0);
    const auto from_c = context_distribution(trained.model, 2);
    EXPECT_GT(from_a[1], from_a[3]);
    EXPECT_GT(from_a[1], 0.5);
    EXPECT_GT(from_c[3], from_c[1]);
    EXPECT_LT(trained.epoch_losses.back(), trained.initial_loss);
}

TEST(Embedding, DegenerateCorpusStaysFinite) {
    const std::vector<WordId> words = {0, 0, 0};
    const auto wm = train_embeddings(build_sentences(words, 3), 1, {.n_v = 3, .epochs = 20});
    ASSERT_EQ(wm.n_w(), 1u);
    ASSERT_EQ(wm.n_v(), 3u);
    for (double v : wm.weights.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Embedding, Errors) {
    const std::vector<WordId> words = {0, 1, 2};
    EXPECT_THROW(train_embeddings(build_sentences(words, 1), 3, {}), std::invalid_argument);
    EXPECT_THROW(train_embeddings(build_sentences(words, 3), 3, {.learning_rate = 0.0}), std::invalid_argument);
    EXPECT_THROW(train_embeddings(build_sentences(words, 3), 2, {}), std::invalid_argument);
}

TEST(Embedding, LossNonIncreasingEarlyAndDeterministic) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<WordId> w(0, 5);
    std::vector<WordId> words(200);
    for (auto& x : words) x = w(rng);
    const auto sentences = build_sentences(words, 5);
    const EmbeddingConfig config{.n_v = 4, .n_ww = 2, .epochs = 3, .learning_rate = 0.002,
                                 .min_learning_rate = 0.001, .seed = 6};
    const auto a = train_skipgram(sentences, 6, config);
    ASSERT_EQ(a.epoch_losses.size(), 3u);
    EXPECT_LE(a.epoch_losses[0], a.initial_loss + 1e-6);
    for (std::size_t i = 1; i < a.epoch_losses.size(); ++i) EXPECT_LE(a.epoch_losses[i], a.epoch_losses[i - 1] + 1e-6);

    const auto b = train_skipgram(sentences, 6, config);
    EXPECT_EQ(a.model.input, b.model.input);
    EXPECT_EQ(a.model.output, b.model.output);
    const auto c = train_skipgram(sentences, 6, {.n_v = 4, .n_ww = 2, .epochs = 3, .seed = 7});
    EXPECT_FALSE(a.model.input == c.model.input);
}

TEST(Embedding, VectorProbeExactAnalogy) {
    EmbeddingMatrix wm{Matrix(6, 3)};
    const double rows[6][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, -1, 1}, {0.2, 0.9, 0.1}, {-1, 0, 0}};
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t k = 0; k < 3; ++k) wm.weights(i, k) = rows[i][k];
    EXPECT_EQ(vector_arithmetic_probe(wm, 0, 1, 2), 3u);
}

TEST(Embedding, VectorProbeExcludesInputs) {
    EmbeddingMatrix wm{Matrix(5, 5)};
    for (std::size_t i = 0; i < 5; ++i) wm.weights(i, i) = 1.0;
    wm.weights(4, 2) = 0.5;  // row 4 leans toward row 2
    // a == b, so the target is vec(c) = e2; c itself is excluded.
    EXPECT_EQ(vector_arithmetic_probe(wm, 0, 0, 2), 4u);
}

TEST(Embedding, VectorProbeMatchesLinearScan) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        EmbeddingMatrix wm{Matrix(12, 4)};
        for (auto& v : wm.weights.values()) v = g(rng);
        const WordId a = trial % 12, b = (trial * 5 + 1) % 12, c = (trial * 7 + 3) % 12;
        std::vector<double> t(4);
        for (int k = 0; k < 4; ++k) t[k] = wm.weights(a, k) - wm.weights(b, k) + wm.weights(c, k);
        WordId best = 0;
        double best_sim = -2;
        for (WordId i = 0; i < 12; ++i) {
            if (i == a || i == b || i == c) continue;
            double dot = 0, nt = 0, ni = 0;
            for (int k = 0; k < 4; ++k) {
                dot += t[k] * wm.weights(i, k);
                nt += t[k] * t[k];
                ni += wm.weights(i, k) * wm.weights(i, k);
            }
            const double sim = dot / std::sqrt(nt * ni);
            if (sim > best_sim) {
                best_sim = sim;
                best = i;
            }
        }
        EXPECT_EQ(vector_arithmetic_probe(wm, a, b, c), best);
    }
    EXPECT_THROW(vector_arithmetic_probe(EmbeddingMatrix{Matrix(3, 2)}, 0, 1, 2), std::invalid_argument);
}

TEST(Embedding, JsonRoundTrip) {
    const std::vector<WordId> words = {0, 1, 2, 3, 1, 2, 0};
    const EmbeddingConfig config{.n_v = 3, .epochs = 2};
    const auto wm = train_embeddings(build_sentences(words, 3), 4, config);
    const auto j = nlohmann::json::parse(to_json(wm, config).dump());
    EXPECT_EQ(j.at("n_w"), 4);
    EXPECT_EQ(j.at("n_v"), 3);
    EXPECT_EQ(embedding_from_json(j), wm);
    EXPECT_THROW(embedding_from_json(nlohmann::json{{"n_w", 1}, {"n_v", 2}, {"rows", {{1.0}}}}), DataError);
}
