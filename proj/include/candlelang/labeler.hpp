#pragma once

#include "candlelang/market_data.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace candlelang {

enum class Action : std::uint8_t { Buy = 0, Sell = 1, Hold = 2 };

inline constexpr std::size_t kActionCount = 3;

std::string_view to_string(Action action);

struct LabelingParams {
    std::size_t n_la = 5;   // look-ahead horizon, trading days
    double v_fee = 10.0;    // flat fee per transaction
    double equity = 10000.0;
};

/// ceil(equity / close).
std::int64_t max_shares(double close, double equity);

/// Look-ahead labels for the first closes.size() - n_la days. Day i is BUY
/// (SELL) if some j in (i, i + n_la] moves n_max * C past n_max * C_i by more
/// than two fees upward (downward); the earliest crossing wins. Otherwise
/// HOLD. Throws std::invalid_argument if the series is not longer than n_la.
std::vector<Action> label_days(std::span<const double> closes, const LabelingParams& params);

/// `date,label` CSV for the labeled prefix of `bars`.
void write_labels(std::ostream& out, std::span<const OhlcBar> bars, std::span<const Action> labels);

}  // namespace candlelang
