#include "candlelang/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace candlelang {

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double signed_rank_mean(std::size_t n) {
    const double nn = static_cast<double>(n);
    return nn * (nn + 1.0) / 4.0;
}

double signed_rank_sd(std::size_t n) {
    const double nn = static_cast<double>(n);
    return std::sqrt(nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0);
}

WilcoxonResult wilcoxon_from_statistic(double w, std::size_t n) {
    if (n == 0) throw std::invalid_argument("wilcoxon: N must be positive");
    WilcoxonResult r;
    r.w_statistic = w;
    r.n_effective = n;
    r.z_score = (w - signed_rank_mean(n)) / signed_rank_sd(n);
    r.p_one_tailed = std::clamp(standard_normal_cdf(r.z_score), 0.0, 1.0);
    r.p_two_tailed = std::clamp(2.0 * standard_normal_cdf(-std::abs(r.z_score)), 0.0, 1.0);
    return r;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> yields_a, std::span<const double> yields_b) {
    if (yields_a.size() != yields_b.size()) throw std::invalid_argument("wilcoxon: samples differ in length");
    if (yields_a.size() < 6) throw std::invalid_argument("wilcoxon: need at least 6 pairs");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < yields_a.size(); ++i) {
        const double d = yields_a[i] - yields_b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw std::invalid_argument("wilcoxon: all differences are zero");

    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });

    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && std::abs(diffs[order[end]]) == std::abs(diffs[order[start]])) ++end;
        // Ranks start..end-1 (0-based) share the average 1-based rank.
        const double rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t k = start; k < end; ++k) (diffs[order[k]] > 0.0 ? w_plus : w_minus) += rank;
        start = end;
    }

    auto r = wilcoxon_from_statistic(std::min(w_plus, w_minus), diffs.size());
    r.w_plus = w_plus;
    r.w_minus = w_minus;

    std::vector<double> sorted = diffs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    r.median_difference = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return r;
}

double mean_yield(std::span<const double> yields) {
    if (yields.empty()) throw std::invalid_argument("mean_yield: no yields");
    return std::accumulate(yields.begin(), yields.end(), 0.0) / static_cast<double>(yields.size());
}

double mean_yield(std::span<const YieldReport> reports) {
    std::vector<double> yields;
    yields.reserve(reports.size());
    for (const auto& r : reports) yields.push_back(r.yield);
    return mean_yield(yields);
}

}  // namespace candlelang
