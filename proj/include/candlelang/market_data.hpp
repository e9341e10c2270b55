#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace candlelang {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 `YYYY-MM-DD` date. Throws DataError on malformed input.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// One trading day. Prices are in currency units.
struct OhlcBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;

    friend bool operator==(const OhlcBar&, const OhlcBar&) = default;
};

/// Candle shape relative to its open: (H/O, L/O, C/O). The leading 1 (O/O)
/// is implicit.
struct NormalizedBar {
    double h_ratio = 1.0;
    double l_ratio = 1.0;
    double c_ratio = 1.0;

    friend bool operator==(const NormalizedBar&, const NormalizedBar&) = default;
};

/// Returns an empty string when the bar is valid, otherwise a description of
/// the first violated price invariant.
std::string validate_bar(const OhlcBar& bar);

/// Reads `date,open,high,low,close` CSV. Bars must be strictly ascending by
/// date and satisfy the price invariants; violations throw DataError naming
/// the offending row (1-based, header is row 1).
std::vector<OhlcBar> read_series(std::istream& in);
std::vector<OhlcBar> load_series(const std::filesystem::path& path);

/// Writes bars in the format read by read_series. Prices use the shortest
/// round-trip decimal representation.
void write_series(std::ostream& out, std::span<const OhlcBar> bars);
void write_series(const std::filesystem::path& path, std::span<const OhlcBar> bars);

NormalizedBar normalize(const OhlcBar& bar);
std::vector<NormalizedBar> normalize(std::span<const OhlcBar> bars);

/// Multiplies all four prices by `factor`.
OhlcBar scale(const OhlcBar& bar, double factor);

std::vector<double> closes_of(std::span<const OhlcBar> bars);

}  // namespace candlelang
