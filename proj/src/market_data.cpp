#include "candlelang/market_data.hpp"

#include "candlelang/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace candlelang {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_int(std::string_view text, int& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_price(std::string_view text, double& out) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string shortest(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string describe(const OhlcBar& bar) {
    std::ostringstream os;
    os << format_date(bar.date) << " (O=" << shortest(bar.open) << " H=" << shortest(bar.high)
       << " L=" << shortest(bar.low) << " C=" << shortest(bar.close) << ")";
    return os.str();
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    int m = 0;
    int d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
        !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
        throw DataError("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::string validate_bar(const OhlcBar& bar) {
    if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
        return "prices must be strictly positive";
    }
    if (bar.low > bar.high) return "low exceeds high";
    if (bar.low > std::min(bar.open, bar.close)) return "low exceeds min(open, close)";
    if (bar.high < std::max(bar.open, bar.close)) return "high below max(open, close)";
    return {};
}

std::vector<OhlcBar> read_series(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    std::vector<OhlcBar> bars;

    while (std::getline(in, line)) {
        ++row;
        const auto content = trim(line);
        if (content.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            std::string lowered(content);
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lowered != "date,open,high,low,close") {
                throw DataError("row 1: expected header 'date,open,high,low,close'");
            }
            continue;
        }

        const auto fields = split_commas(content);
        if (fields.size() != 5) {
            throw DataError("row " + std::to_string(row) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
        }
        OhlcBar bar;
        try {
            bar.date = parse_date(fields[0]);
        } catch (const DataError& e) {
            throw DataError("row " + std::to_string(row) + ": " + e.what());
        }
        double* prices[] = {&bar.open, &bar.high, &bar.low, &bar.close};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!parse_price(fields[i + 1], *prices[i])) {
                throw DataError("row " + std::to_string(row) + ": malformed price '" +
                                std::string(fields[i + 1]) + "'");
            }
        }
        if (auto problem = validate_bar(bar); !problem.empty()) {
            throw DataError("row " + std::to_string(row) + ": " + problem + " in bar " + describe(bar));
        }
        if (!bars.empty() && !(bars.back().date < bar.date)) {
            throw DataError("row " + std::to_string(row) + ": date " + format_date(bar.date) +
                            " does not follow " + format_date(bars.back().date));
        }
        bars.push_back(bar);
    }

    if (bars.empty()) throw DataError("empty series");
    return bars;
}

std::vector<OhlcBar> load_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return read_series(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_series(std::ostream& out, std::span<const OhlcBar> bars) {
    out << "date,open,high,low,close\n";
    for (const auto& bar : bars) {
        out << format_date(bar.date) << ',' << shortest(bar.open) << ',' << shortest(bar.high) << ','
            << shortest(bar.low) << ',' << shortest(bar.close) << '\n';
    }
}

void write_series(const std::filesystem::path& path, std::span<const OhlcBar> bars) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_series(out, bars);
    if (!out) throw DataError("write failed for " + path.string());
}

NormalizedBar normalize(const OhlcBar& bar) {
    return {bar.high / bar.open, bar.low / bar.open, bar.close / bar.open};
}

std::vector<NormalizedBar> normalize(std::span<const OhlcBar> bars) {
    std::vector<NormalizedBar> out;
    out.reserve(bars.size());
    for (const auto& bar : bars) out.push_back(normalize(bar));
    return out;
}

OhlcBar scale(const OhlcBar& bar, double factor) {
    return {bar.date, bar.open * factor, bar.high * factor, bar.low * factor, bar.close * factor};
}

std::vector<double> closes_of(std::span<const OhlcBar> bars) {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& bar : bars) out.push_back(bar.close);
    return out;
}

}  // namespace candlelang
