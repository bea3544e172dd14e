// market_data.hpp
// Candle ingestion (Binance kline CSV), resampling and pair alignment.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairtrade/decimal.hpp"

namespace pairtrade {

enum class Interval { M1, M3, M5 };

std::int64_t interval_ms(Interval interval) noexcept;
int interval_minutes(Interval interval) noexcept;
std::string_view to_string(Interval interval) noexcept;
// Throws Error(ConfigError) for anything other than "1m", "3m", "5m".
Interval parse_interval(std::string_view text);

struct Candle {
    std::int64_t open_time = 0;  // epoch ms, UTC
    Decimal open;
    Decimal high;
    Decimal low;
    Decimal close;
    Decimal volume;
    Interval interval = Interval::M1;
};

// Empty string when the candle satisfies OHLC consistency, alignment and volume >= 0;
// otherwise a description of the first violated invariant.
std::string candle_violation(const Candle& candle);

struct AlignedPairSeries {
    std::string symbol_i;
    std::string symbol_j;
    Interval interval = Interval::M1;
    std::vector<std::int64_t> timestamps;
    std::vector<double> prices_i;
    std::vector<double> prices_j;

    std::size_t size() const noexcept { return timestamps.size(); }
    std::string pair_name() const { return symbol_i + "-" + symbol_j; }
    // Rows whose timestamp lies in [start_ms, end_ms).
    AlignedPairSeries slice_time(std::int64_t start_ms, std::int64_t end_ms) const;
    AlignedPairSeries slice(std::size_t first, std::size_t count) const;
};

// Headerless CSV: open_time,open,high,low,close,volume[,ignored...].
// Output sorted by open_time.
std::vector<Candle> parse_klines(std::istream& in, Interval interval);
std::vector<Candle> parse_klines(const std::filesystem::path& path, Interval interval);

void write_klines(std::ostream& out, std::span<const Candle> candles);
void write_klines(const std::filesystem::path& path, std::span<const Candle> candles);

// Aggregate 1m candles into factor-minute bars aligned to factor-minute boundaries.
// Groups with fewer than `factor` candles (gaps, trailing partial groups) are dropped.
std::vector<Candle> resample(std::span<const Candle> candles, int factor);

// Inner join on open_time using close prices. Zero-volume rows are always dropped;
// rows where either leg's volume is below that leg's min_volume_quantile empirical
// quantile (lower inverse ECDF over the full leg input) are dropped as well.
AlignedPairSeries align_pair(std::span<const Candle> a, std::span<const Candle> b,
                             double min_volume_quantile = 0.0,
                             std::string symbol_i = "I", std::string symbol_j = "J");

// Lower empirical quantile: smallest v with ECDF(v) >= q (q = 0 gives the minimum).
Decimal empirical_quantile(std::span<const Candle> candles, double q);

}  // namespace pairtrade
