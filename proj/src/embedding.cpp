#include "candlelang/embedding.hpp"

#include "candlelang/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace candlelang {

namespace {

// Softmax over output scores for a hidden activation; returns probabilities.
void output_probabilities(const Matrix& output, std::span<const double> hidden, std::vector<double>& probs) {
    const std::size_t n_w = output.rows();
    probs.resize(n_w);
    double max_score = -INFINITY;
    for (std::size_t j = 0; j < n_w; ++j) {
        double s = 0.0;
        const auto row = output.row(j);
        for (std::size_t k = 0; k < hidden.size(); ++k) s += row[k] * hidden[k];
        probs[j] = s;
        max_score = std::max(max_score, s);
    }
    double total = 0.0;
    for (auto& p : probs) {
        p = std::exp(p - max_score);
        total += p;
    }
    for (auto& p : probs) p /= total;
}

void check_pairs(const SkipGramModel& model, std::span<const SkipGramPair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("skip-gram: no training pairs");
    for (const auto& pair : pairs) {
        if (pair.center >= model.input.rows() || pair.context >= model.output.rows()) {
            throw std::invalid_argument("skip-gram: word id out of range");
        }
    }
}

}  // namespace

std::vector<SkipGramPair> skipgram_pairs(const SentenceMatrix& sentences, std::size_t n_ww) {
    std::vector<SkipGramPair> pairs;
    const std::size_t len = sentences.sentence_length();
    for (std::size_t r = 0; r < sentences.sentence_count(); ++r) {
        const auto s = sentences.sentence(r);
        for (std::size_t p = 0; p < len; ++p) {
            const std::size_t lo = p >= n_ww ? p - n_ww : 0;
            const std::size_t hi = std::min(len - 1, p + n_ww);
            for (std::size_t q = lo; q <= hi; ++q) {
                if (q != p) pairs.push_back({s[p], s[q]});
            }
        }
    }
    return pairs;
}

double skipgram_loss(const SkipGramModel& model, std::span<const SkipGramPair> pairs) {
    check_pairs(model, pairs);
    std::vector<double> probs;
    double total = 0.0;
    for (const auto& pair : pairs) {
        output_probabilities(model.output, model.input.row(pair.center), probs);
        total -= std::log(probs[pair.context]);
    }
    return total / static_cast<double>(pairs.size());
}

SkipGramModel skipgram_gradient(const SkipGramModel& model, std::span<const SkipGramPair> pairs) {
    check_pairs(model, pairs);
    const std::size_t n_w = model.output.rows();
    const std::size_t n_v = model.input.cols();
    SkipGramModel grad{Matrix(model.input.rows(), n_v), Matrix(n_w, n_v)};
    const double scale = 1.0 / static_cast<double>(pairs.size());

    std::vector<double> probs;
    for (const auto& pair : pairs) {
        const auto hidden = model.input.row(pair.center);
        output_probabilities(model.output, hidden, probs);
        probs[pair.context] -= 1.0;
        auto g_in = grad.input.row(pair.center);
        for (std::size_t j = 0; j < n_w; ++j) {
            const auto out_row = model.output.row(j);
            auto g_out = grad.output.row(j);
            for (std::size_t k = 0; k < n_v; ++k) {
                g_out[k] += scale * probs[j] * hidden[k];
                g_in[k] += scale * probs[j] * out_row[k];
            }
        }
    }
    return grad;
}

std::vector<double> context_distribution(const SkipGramModel& model, WordId center) {
    std::vector<double> probs;
    output_probabilities(model.output, model.input.row(center), probs);
    return probs;
}

SkipGramTraining train_skipgram(const SentenceMatrix& sentences, std::size_t n_w, const EmbeddingConfig& config) {
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("skip-gram: learning rate must be positive");
    if (config.n_v == 0 || config.n_ww == 0) throw std::invalid_argument("skip-gram: n_v and n_ww must be >= 1");
    if (n_w == 0) throw std::invalid_argument("skip-gram: n_w must be >= 1");

    auto pairs = skipgram_pairs(sentences, config.n_ww);
    if (pairs.empty()) throw std::invalid_argument("skip-gram: empty corpus (need a sentence of length >= 2)");

    std::mt19937_64 rng(static_cast<std::uint64_t>(config.seed));
    const double init = 0.5 / static_cast<double>(config.n_v);
    std::uniform_real_distribution<double> uniform(-init, init);

    SkipGramTraining result;
    auto& model = result.model;
    model.input = Matrix(n_w, config.n_v);
    model.output = Matrix(n_w, config.n_v);
    for (auto& v : model.input.values()) v = uniform(rng);
    for (auto& v : model.output.values()) v = uniform(rng);
    check_pairs(model, pairs);

    result.initial_loss = skipgram_loss(model, pairs);

    const double lr_end = std::min(config.min_learning_rate, config.learning_rate);
    const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(pairs.size());
    double step = 0.0;
    std::vector<double> probs;
    std::vector<double> grad_hidden(config.n_v);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(pairs.begin(), pairs.end(), rng);
        for (const auto& pair : pairs) {
            const double lr = config.learning_rate - (config.learning_rate - lr_end) * (step / total_steps);
            step += 1.0;

            auto hidden = model.input.row(pair.center);
            output_probabilities(model.output, hidden, probs);
            probs[pair.context] -= 1.0;
            std::fill(grad_hidden.begin(), grad_hidden.end(), 0.0);
            for (std::size_t j = 0; j < n_w; ++j) {
                auto out_row = model.output.row(j);
                for (std::size_t k = 0; k < config.n_v; ++k) {
                    grad_hidden[k] += probs[j] * out_row[k];
                    out_row[k] -= lr * probs[j] * hidden[k];
                }
            }
            for (std::size_t k = 0; k < config.n_v; ++k) hidden[k] -= lr * grad_hidden[k];
        }
        result.epoch_losses.push_back(skipgram_loss(model, pairs));
    }
    return result;
}

EmbeddingMatrix train_embeddings(const SentenceMatrix& sentences, std::size_t n_w, const EmbeddingConfig& config) {
    return {train_skipgram(sentences, n_w, config).model.input};
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

WordId vector_arithmetic_probe(const EmbeddingMatrix& wm, WordId a, WordId b, WordId c) {
    const std::size_t n_w = wm.n_w();
    if (n_w <= 3) throw std::invalid_argument("vector probe needs more than 3 words");
    if (a >= n_w || b >= n_w || c >= n_w) throw std::invalid_argument("vector probe: word id out of range");

    std::vector<double> target(wm.n_v());
    for (std::size_t k = 0; k < target.size(); ++k) {
        target[k] = wm.vector(a)[k] - wm.vector(b)[k] + wm.vector(c)[k];
    }
    WordId best = 0;
    double best_sim = -INFINITY;
    for (std::size_t i = 0; i < n_w; ++i) {
        if (i == a || i == b || i == c) continue;
        const double sim = cosine_similarity(target, wm.vector(static_cast<WordId>(i)));
        if (sim > best_sim) {
            best_sim = sim;
            best = static_cast<WordId>(i);
        }
    }
    return best;
}

nlohmann::json to_json(const EmbeddingMatrix& wm, const EmbeddingConfig& config) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < wm.n_w(); ++i) {
        const auto r = wm.vector(static_cast<WordId>(i));
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {{"n_w", wm.n_w()},
            {"n_v", wm.n_v()},
            {"rows", std::move(rows)},
            {"config",
             {{"n_v", config.n_v},
              {"n_ww", config.n_ww},
              {"epochs", config.epochs},
              {"learning_rate", config.learning_rate},
              {"min_learning_rate", config.min_learning_rate},
              {"seed", config.seed}}}};
}

EmbeddingMatrix embedding_from_json(const nlohmann::json& j) {
    try {
        const auto n_w = j.at("n_w").get<std::size_t>();
        const auto n_v = j.at("n_v").get<std::size_t>();
        const auto& rows = j.at("rows");
        if (rows.size() != n_w) throw DataError("embedding json: row count does not match n_w");
        EmbeddingMatrix wm{Matrix(n_w, n_v)};
        for (std::size_t i = 0; i < n_w; ++i) {
            if (rows[i].size() != n_v) throw DataError("embedding json: row width does not match n_v");
            for (std::size_t k = 0; k < n_v; ++k) {
                const double v = rows[i][k].get<double>();
                if (!std::isfinite(v)) throw DataError("embedding json: non-finite entry");
                wm.weights(i, k) = v;
            }
        }
        return wm;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("embedding json: ") + e.what());
    }
}

}  // namespace candlelang
