#include "candlelang/labeler.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace candlelang {

std::string_view to_string(Action action) {
    switch (action) {
        case Action::Buy: return "BUY";
        case Action::Sell: return "SELL";
        case Action::Hold: return "HOLD";
    }
    return "HOLD";
}

std::int64_t max_shares(double close, double equity) {
    if (!(close > 0.0)) throw std::invalid_argument("max_shares: close must be positive");
    return static_cast<std::int64_t>(std::ceil(equity / close));
}

std::vector<Action> label_days(std::span<const double> closes, const LabelingParams& params) {
    if (params.n_la == 0) throw std::invalid_argument("label_days: n_la must be >= 1");
    if (params.v_fee < 0.0 || !(params.equity > 0.0)) {
        throw std::invalid_argument("label_days: need v_fee >= 0 and equity > 0");
    }
    if (closes.size() <= params.n_la) {
        throw std::invalid_argument("label_days: series of " + std::to_string(closes.size()) +
                                    " days is too short for look-ahead " + std::to_string(params.n_la));
    }

    const std::size_t labeled = closes.size() - params.n_la;
    std::vector<Action> labels(labeled, Action::Hold);
    for (std::size_t i = 0; i < labeled; ++i) {
        const double n_max = static_cast<double>(max_shares(closes[i], params.equity));
        const double base = n_max * closes[i];
        const double upper = base + 2.0 * params.v_fee;
        const double lower = base - 2.0 * params.v_fee;
        for (std::size_t j = i + 1; j <= i + params.n_la; ++j) {
            const double value = n_max * closes[j];
            if (value > upper) {
                labels[i] = Action::Buy;
                break;
            }
            if (value < lower) {
                labels[i] = Action::Sell;
                break;
            }
        }
    }
    return labels;
}

void write_labels(std::ostream& out, std::span<const OhlcBar> bars, std::span<const Action> labels) {
    if (labels.size() > bars.size()) throw std::invalid_argument("write_labels: more labels than bars");
    out << "date,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << format_date(bars[i].date) << ',' << to_string(labels[i]) << '\n';
    }
}

}  // namespace candlelang
