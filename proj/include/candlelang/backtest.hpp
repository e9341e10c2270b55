#pragma once

#include "candlelang/labeler.hpp"
#include "candlelang/market_data.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace candlelang {

enum class Side { Buy, Sell };

struct Trade {
    std::size_t day = 0;  // index into the simulated window
    Side side = Side::Buy;
    std::int64_t shares = 0;
    double price = 0.0;
    double fee = 0.0;
    double cash_after = 0.0;
    std::int64_t shares_after = 0;
    bool liquidation = false;  // forced close at the end of the window
};

struct TradeLedger {
    std::vector<Trade> trades;
    double initial_cash = 0.0;
    double final_cash = 0.0;
    std::int64_t final_shares = 0;
    std::size_t skipped_buys = 0;  // BUY signals that could not afford one share

    double yield() const noexcept { return final_cash - initial_cash; }
};

enum class Phase { Test, Validation };

std::string_view to_string(Phase phase);

/// Yield of one strategy on one ticker: final liquidation value minus the
/// initial equity.
struct YieldReport {
    std::string ticker;
    std::string strategy;
    Phase phase = Phase::Test;
    double yield = 0.0;
};

struct StrategyRun {
    std::span<const Action> actions;
    double equity = 10000.0;
    double v_fee = 10.0;
};

/// Long-only, all-in/all-out execution at the signal day's close. BUY while
/// flat buys min(ceil(cash/C), floor((cash - fee)/C)) shares; SELL while long
/// sells everything; other signals are no-ops. An open position is liquidated
/// at the last close. Throws std::invalid_argument on an empty or misaligned
/// action stream.
TradeLedger simulate(std::span<const double> closes, const StrategyRun& run);

/// Buy at the first close, liquidate at the last one.
TradeLedger buy_and_hold(std::span<const double> closes, double equity, double v_fee);

/// Simple moving average; entries before the window fills are NaN.
std::vector<double> sma(std::span<const double> values, std::size_t window);

/// Exponential moving average with alpha = 2 / (span + 1), seeded with the
/// first value.
std::vector<double> ema(std::span<const double> values, std::size_t span);

/// BUY when the short SMA crosses above the long SMA, SELL when it crosses
/// below. A cross is a strict change between nonzero signs of the difference;
/// days before both windows are full emit HOLD. Throws when the series is not
/// longer than the long window.
std::vector<Action> ma_crossover(std::span<const double> closes, std::size_t short_window = 50,
                                 std::size_t long_window = 100);

/// BUY when the MACD line (EMA_fast - EMA_slow) crosses above its signal EMA,
/// SELL on a cross below. Crossings are evaluated from day slow + signal - 2
/// onward. Throws when the series is not longer than slow + signal.
std::vector<Action> macd(std::span<const double> closes, std::size_t fast = 12, std::size_t slow = 26,
                         std::size_t signal = 9);

std::string_view to_string(Side side);

/// `date,side,shares,price,fee,cash_after`; `dates` covers the simulated window.
void write_ledger(std::ostream& out, const TradeLedger& ledger, std::span<const Date> dates);

}  // namespace candlelang
