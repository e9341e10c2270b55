#pragma once

#include "candlelang/backtest.hpp"

#include <cstddef>
#include <span>

namespace candlelang {

struct WilcoxonResult {
    double w_statistic = 0.0;  // min(W+, W-)
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n_effective = 0;  // pairs left after dropping zero differences
    double z_score = 0.0;
    double p_one_tailed = 1.0;
    double p_two_tailed = 1.0;
    double median_difference = 0.0;  // median of a - b over the nonzero pairs
};

double standard_normal_cdf(double z);

/// N(N+1)/4 and sqrt(N(N+1)(2N+1)/24): the mean and standard deviation of the
/// signed-rank statistic under the null.
double signed_rank_mean(std::size_t n);
double signed_rank_sd(std::size_t n);

/// Normal approximation for a given statistic, no continuity correction.
/// z <= 0 whenever W is below its null mean; p_one_tailed = Phi(z).
WilcoxonResult wilcoxon_from_statistic(double w, std::size_t n);

/// Paired signed-rank test on a - b. Zero differences are dropped and tied
/// |d| share their average rank. Throws std::invalid_argument on a length
/// mismatch, fewer than 6 pairs, or when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> yields_a, std::span<const double> yields_b);

/// Arithmetic mean; throws std::invalid_argument on empty input.
double mean_yield(std::span<const double> yields);
double mean_yield(std::span<const YieldReport> reports);

}  // namespace candlelang
