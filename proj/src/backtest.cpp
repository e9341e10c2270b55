#include "candlelang/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace candlelang {

namespace {

// Relative band inside which two moving averages count as equal.
constexpr double kCrossTolerance = 1e-10;

int sign_with_tolerance(double diff, double reference) {
    const double tol = kCrossTolerance * std::max(1.0, std::abs(reference));
    if (diff > tol) return 1;
    if (diff < -tol) return -1;
    return 0;
}

// Emits BUY/SELL where the sign of `diff` strictly changes between nonzero
// values, considering only days >= first_valid.
std::vector<Action> crossings(std::span<const double> diff, std::span<const double> reference,
                              std::size_t first_valid) {
    std::vector<Action> actions(diff.size(), Action::Hold);
    int last = 0;
    for (std::size_t t = first_valid; t < diff.size(); ++t) {
        const int s = sign_with_tolerance(diff[t], reference[t]);
        if (s == 0) continue;
        if (last != 0 && s != last) actions[t] = s > 0 ? Action::Buy : Action::Sell;
        last = s;
    }
    return actions;
}

}  // namespace

std::string_view to_string(Phase phase) { return phase == Phase::Test ? "test" : "validation"; }

std::string_view to_string(Side side) { return side == Side::Buy ? "BUY" : "SELL"; }

TradeLedger simulate(std::span<const double> closes, const StrategyRun& run) {
    if (run.actions.empty()) throw std::invalid_argument("simulate: empty action stream");
    if (run.actions.size() != closes.size()) {
        throw std::invalid_argument("simulate: " + std::to_string(run.actions.size()) + " actions for " +
                                    std::to_string(closes.size()) + " closes");
    }

    TradeLedger ledger;
    ledger.initial_cash = run.equity;
    double cash = run.equity;
    std::int64_t shares = 0;

    auto sell_all = [&](std::size_t day, bool liquidation) {
        const double price = closes[day];
        cash += static_cast<double>(shares) * price - run.v_fee;
        ledger.trades.push_back({day, Side::Sell, shares, price, run.v_fee, cash, 0, liquidation});
        shares = 0;
    };

    for (std::size_t t = 0; t < closes.size(); ++t) {
        const double price = closes[t];
        switch (run.actions[t]) {
            case Action::Buy: {
                if (shares != 0) break;
                const double wanted = std::ceil(cash / price);
                const double affordable = std::floor((cash - run.v_fee) / price);
                const double count = std::min(wanted, affordable);
                if (count < 1.0) {
                    ++ledger.skipped_buys;
                    break;
                }
                shares = static_cast<std::int64_t>(count);
                cash -= count * price + run.v_fee;
                ledger.trades.push_back({t, Side::Buy, shares, price, run.v_fee, cash, shares, false});
                break;
            }
            case Action::Sell:
                if (shares > 0) sell_all(t, false);
                break;
            case Action::Hold:
                break;
        }
    }
    if (shares > 0) sell_all(closes.size() - 1, true);

    ledger.final_cash = cash;
    ledger.final_shares = shares;
    return ledger;
}

TradeLedger buy_and_hold(std::span<const double> closes, double equity, double v_fee) {
    if (closes.empty()) throw std::invalid_argument("buy_and_hold: empty series");
    std::vector<Action> actions(closes.size(), Action::Hold);
    actions.front() = Action::Buy;
    return simulate(closes, {actions, equity, v_fee});
}

std::vector<double> sma(std::span<const double> values, std::size_t window) {
    if (window == 0) throw std::invalid_argument("sma: window must be >= 1");
    std::vector<double> out(values.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = window - 1; t < values.size(); ++t) {
        double sum = 0.0;
        for (std::size_t k = t + 1 - window; k <= t; ++k) sum += values[k];
        out[t] = sum / static_cast<double>(window);
    }
    return out;
}

std::vector<double> ema(std::span<const double> values, std::size_t span) {
    if (span == 0) throw std::invalid_argument("ema: span must be >= 1");
    std::vector<double> out(values.size());
    if (values.empty()) return out;
    const double alpha = 2.0 / (static_cast<double>(span) + 1.0);
    double level = values[0];
    out[0] = level;
    for (std::size_t t = 1; t < values.size(); ++t) {
        level += alpha * (values[t] - level);
        out[t] = level;
    }
    return out;
}

std::vector<Action> ma_crossover(std::span<const double> closes, std::size_t short_window, std::size_t long_window) {
    if (short_window == 0 || short_window >= long_window) {
        throw std::invalid_argument("ma_crossover: need 0 < short window < long window");
    }
    if (closes.size() <= long_window) {
        throw std::invalid_argument("ma_crossover: series of " + std::to_string(closes.size()) +
                                    " days is too short for window " + std::to_string(long_window));
    }
    const auto fast = sma(closes, short_window);
    const auto slow = sma(closes, long_window);
    std::vector<double> diff(closes.size(), 0.0);
    for (std::size_t t = long_window - 1; t < closes.size(); ++t) diff[t] = fast[t] - slow[t];
    return crossings(diff, closes, long_window - 1);
}

std::vector<Action> macd(std::span<const double> closes, std::size_t fast, std::size_t slow, std::size_t signal) {
    if (fast == 0 || fast >= slow || signal == 0) throw std::invalid_argument("macd: need 0 < fast < slow, signal > 0");
    if (closes.size() <= slow + signal) {
        throw std::invalid_argument("macd: series of " + std::to_string(closes.size()) + " days is too short");
    }
    const auto ema_fast = ema(closes, fast);
    const auto ema_slow = ema(closes, slow);
    std::vector<double> line(closes.size());
    for (std::size_t t = 0; t < closes.size(); ++t) line[t] = ema_fast[t] - ema_slow[t];
    const auto signal_line = ema(line, signal);
    std::vector<double> diff(closes.size());
    for (std::size_t t = 0; t < closes.size(); ++t) diff[t] = line[t] - signal_line[t];
    return crossings(diff, closes, slow + signal - 2);
}

void write_ledger(std::ostream& out, const TradeLedger& ledger, std::span<const Date> dates) {
    out << "date,side,shares,price,fee,cash_after\n";
    char buf[160];
    for (const auto& trade : ledger.trades) {
        if (trade.day >= dates.size()) throw std::invalid_argument("write_ledger: trade day outside date range");
        std::snprintf(buf, sizeof(buf), "%s,%s,%lld,%.6f,%.6f,%.6f\n", format_date(dates[trade.day]).c_str(),
                      std::string(to_string(trade.side)).c_str(), static_cast<long long>(trade.shares), trade.price,
                      trade.fee, trade.cash_after);
        out << buf;
    }
}

}  // namespace candlelang
