#pragma once

#include "candlelang/market_data.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace candlelang {

/// Index of a candle word in a codebook, in [0, n_w).
using WordId = std::uint32_t;

using RatioPoint = std::array<double, 3>;

inline RatioPoint to_point(const NormalizedBar& bar) { return {bar.h_ratio, bar.l_ratio, bar.c_ratio}; }

/// K-Means centroids in (H/O, L/O, C/O) space. Each centroid is one candle
/// word of the lexicon.
class Codebook {
public:
    Codebook(std::vector<RatioPoint> centroids, std::int64_t seed);

    std::size_t size() const noexcept { return centroids_.size(); }
    std::int64_t seed() const noexcept { return seed_; }
    const std::vector<RatioPoint>& centroids() const noexcept { return centroids_; }
    const RatioPoint& centroid(WordId id) const { return centroids_.at(id); }

    friend bool operator==(const Codebook&, const Codebook&) = default;

private:
    std::vector<RatioPoint> centroids_;
    std::int64_t seed_ = 0;
};

struct KMeansOptions {
    std::size_t n_w = 20;
    std::int64_t seed = 0;
    std::size_t max_iters = 300;
    /// Called once per assignment pass with (iteration, within-cluster sum of
    /// squares under the current centroids).
    std::function<void(std::size_t, double)> on_iteration;
};

/// K-Means with k-means++ seeding. Deterministic for fixed inputs and seed.
/// Throws std::invalid_argument on empty input or when n_w exceeds the number
/// of distinct points.
Codebook fit_codebook(std::span<const NormalizedBar> bars, const KMeansOptions& options);

/// Nearest centroid under Euclidean distance; ties go to the lowest index.
WordId assign_word(const NormalizedBar& bar, const Codebook& codebook);
WordId assign_word(const RatioPoint& point, const Codebook& codebook);
std::vector<WordId> assign_words(std::span<const NormalizedBar> bars, const Codebook& codebook);

double within_cluster_sum_of_squares(std::span<const NormalizedBar> bars, std::span<const WordId> assignments,
                                     const Codebook& codebook);

/// Mean silhouette over all samples. Samples in singleton clusters score 0, as
/// do samples with a = b = 0. Throws std::invalid_argument when fewer than two
/// clusters are non-empty or the inputs are misaligned.
double silhouette_score(std::span<const NormalizedBar> bars, std::span<const WordId> assignments,
                        const Codebook& codebook);

nlohmann::json to_json(const Codebook& codebook);
Codebook codebook_from_json(const nlohmann::json& j);

}  // namespace candlelang
