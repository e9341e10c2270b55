#include "candlelang/lexicon.hpp"

#include "candlelang/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace candlelang {

namespace {

double squared_distance(const RatioPoint& a, const RatioPoint& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

std::size_t count_distinct(std::vector<RatioPoint> points) {
    std::sort(points.begin(), points.end());
    return static_cast<std::size_t>(std::unique(points.begin(), points.end()) - points.begin());
}

std::vector<RatioPoint> kmeans_plus_plus(const std::vector<RatioPoint>& points, std::size_t k,
                                         std::mt19937_64& rng) {
    std::vector<RatioPoint> centroids;
    centroids.reserve(k);
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    centroids.push_back(points[pick(rng)]);

    std::vector<double> nearest(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) nearest[i] = squared_distance(points[i], centroids[0]);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : nearest) total += d;

        // Sample proportionally to D^2; only points with positive weight are
        // eligible, so every new centroid is distinct from the existing ones.
        const double target = unit(rng) * total;
        std::size_t chosen = points.size();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (nearest[i] <= 0.0) continue;
            cumulative += nearest[i];
            chosen = i;
            if (cumulative > target) break;
        }
        centroids.push_back(points[chosen]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centroids.back()));
        }
    }
    return centroids;
}

WordId nearest_centroid(const RatioPoint& point, const std::vector<RatioPoint>& centroids) {
    WordId best = 0;
    double best_d = squared_distance(point, centroids[0]);
    for (std::size_t i = 1; i < centroids.size(); ++i) {
        const double d = squared_distance(point, centroids[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<WordId>(i);
        }
    }
    return best;
}

}  // namespace

Codebook::Codebook(std::vector<RatioPoint> centroids, std::int64_t seed)
    : centroids_(std::move(centroids)), seed_(seed) {
    if (centroids_.empty()) throw std::invalid_argument("codebook needs at least one centroid");
    for (const auto& c : centroids_) {
        if (!std::isfinite(c[0]) || !std::isfinite(c[1]) || !std::isfinite(c[2])) {
            throw std::invalid_argument("codebook centroid is not finite");
        }
    }
    if (count_distinct(centroids_) != centroids_.size()) {
        throw std::invalid_argument("codebook contains duplicate centroids");
    }
}

Codebook fit_codebook(std::span<const NormalizedBar> bars, const KMeansOptions& options) {
    if (bars.empty()) throw std::invalid_argument("fit_codebook: empty input");
    if (options.n_w == 0) throw std::invalid_argument("fit_codebook: n_w must be at least 1");

    std::vector<RatioPoint> points;
    points.reserve(bars.size());
    for (const auto& bar : bars) points.push_back(to_point(bar));

    const std::size_t distinct = count_distinct(points);
    if (options.n_w > distinct) {
        throw std::invalid_argument("fit_codebook: n_w=" + std::to_string(options.n_w) + " exceeds " +
                                    std::to_string(distinct) + " distinct points");
    }

    std::mt19937_64 rng(static_cast<std::uint64_t>(options.seed));
    std::vector<RatioPoint> centroids = kmeans_plus_plus(points, options.n_w, rng);
    std::vector<WordId> assignment(points.size(), 0);
    std::vector<WordId> previous;

    for (std::size_t iter = 0; iter < std::max<std::size_t>(options.max_iters, 1); ++iter) {
        double wcss = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            assignment[i] = nearest_centroid(points[i], centroids);
            wcss += squared_distance(points[i], centroids[assignment[i]]);
        }
        if (options.on_iteration) options.on_iteration(iter, wcss);
        if (assignment == previous) break;
        previous = assignment;

        std::vector<RatioPoint> sums(centroids.size(), RatioPoint{0.0, 0.0, 0.0});
        std::vector<std::size_t> counts(centroids.size(), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto& s = sums[assignment[i]];
            for (int d = 0; d < 3; ++d) s[d] += points[i][d];
            ++counts[assignment[i]];
        }
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            if (counts[c] == 0) continue;
            const double n = static_cast<double>(counts[c]);
            centroids[c] = {sums[c][0] / n, sums[c][1] / n, sums[c][2] / n};
        }

        // Empty clusters take over the point farthest from its own centroid.
        std::vector<bool> used(points.size(), false);
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = points.size();
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (used[i]) continue;
                const double d = squared_distance(points[i], centroids[assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            used[far] = true;
            centroids[c] = points[far];
        }
    }

    return Codebook(std::move(centroids), options.seed);
}

WordId assign_word(const RatioPoint& point, const Codebook& codebook) {
    return nearest_centroid(point, codebook.centroids());
}

WordId assign_word(const NormalizedBar& bar, const Codebook& codebook) {
    return assign_word(to_point(bar), codebook);
}

std::vector<WordId> assign_words(std::span<const NormalizedBar> bars, const Codebook& codebook) {
    std::vector<WordId> words;
    words.reserve(bars.size());
    for (const auto& bar : bars) words.push_back(assign_word(bar, codebook));
    return words;
}

double within_cluster_sum_of_squares(std::span<const NormalizedBar> bars, std::span<const WordId> assignments,
                                     const Codebook& codebook) {
    if (bars.size() != assignments.size()) throw std::invalid_argument("wcss: misaligned assignments");
    double total = 0.0;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        total += squared_distance(to_point(bars[i]), codebook.centroid(assignments[i]));
    }
    return total;
}

double silhouette_score(std::span<const NormalizedBar> bars, std::span<const WordId> assignments,
                        const Codebook& codebook) {
    if (bars.size() != assignments.size()) throw std::invalid_argument("silhouette: misaligned assignments");
    const std::size_t k = codebook.size();
    std::vector<std::size_t> sizes(k, 0);
    for (WordId w : assignments) {
        if (w >= k) throw std::invalid_argument("silhouette: word id out of range");
        ++sizes[w];
    }
    if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2) {
        throw std::invalid_argument("silhouette: fewer than 2 non-empty clusters");
    }

    std::vector<RatioPoint> points;
    points.reserve(bars.size());
    for (const auto& bar : bars) points.push_back(to_point(bar));

    double total = 0.0;
    std::vector<double> dist_sum(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const WordId own = assignments[i];
        if (sizes[own] == 1) continue;
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            dist_sum[assignments[j]] += std::sqrt(squared_distance(points[i], points[j]));
        }
        const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || sizes[c] == 0) continue;
            b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(points.size());
}

nlohmann::json to_json(const Codebook& codebook) {
    nlohmann::json centroids = nlohmann::json::array();
    for (const auto& c : codebook.centroids()) centroids.push_back({c[0], c[1], c[2]});
    return {{"n_w", codebook.size()}, {"seed", codebook.seed()}, {"centroids", std::move(centroids)}};
}

Codebook codebook_from_json(const nlohmann::json& j) {
    try {
        const auto n_w = j.at("n_w").get<std::size_t>();
        std::vector<RatioPoint> centroids;
        for (const auto& c : j.at("centroids")) {
            if (c.size() != 3) throw DataError("codebook centroid must have 3 components");
            centroids.push_back({c[0].get<double>(), c[1].get<double>(), c[2].get<double>()});
        }
        if (centroids.size() != n_w) throw DataError("codebook n_w does not match centroid count");
        return Codebook(std::move(centroids), j.at("seed").get<std::int64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("codebook json: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("codebook json: ") + e.what());
    }
}

}  // namespace candlelang
