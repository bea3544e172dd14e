#include "pairtrade/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pairtrade/errors.hpp"

namespace pairtrade {

std::int64_t interval_ms(Interval interval) noexcept {
    return static_cast<std::int64_t>(interval_minutes(interval)) * 60'000;
}

int interval_minutes(Interval interval) noexcept {
    switch (interval) {
        case Interval::M1: return 1;
        case Interval::M3: return 3;
        case Interval::M5: return 5;
    }
    return 1;
}

std::string_view to_string(Interval interval) noexcept {
    switch (interval) {
        case Interval::M1: return "1m";
        case Interval::M3: return "3m";
        case Interval::M5: return "5m";
    }
    return "1m";
}

Interval parse_interval(std::string_view text) {
    if (text == "1m") return Interval::M1;
    if (text == "3m") return Interval::M3;
    if (text == "5m") return Interval::M5;
    throw Error(Errc::ConfigError, "unknown interval '" + std::string(text) + "'");
}

std::string candle_violation(const Candle& c) {
    if (c.open_time % interval_ms(c.interval) != 0) return "open_time not aligned to interval";
    if (c.volume < Decimal{}) return "negative volume";
    if (c.low > std::min(c.open, c.close)) return "low above min(open, close)";
    if (c.high < std::max(c.open, c.close)) return "high below max(open, close)";
    if (c.low <= Decimal{}) return "non-positive price";
    return {};
}

AlignedPairSeries AlignedPairSeries::slice_time(std::int64_t start_ms, std::int64_t end_ms) const {
    const auto first = std::lower_bound(timestamps.begin(), timestamps.end(), start_ms);
    const auto last = std::lower_bound(timestamps.begin(), timestamps.end(), end_ms);
    const auto offset = static_cast<std::size_t>(first - timestamps.begin());
    const auto count = last > first ? static_cast<std::size_t>(last - first) : 0;
    return slice(offset, count);
}

AlignedPairSeries AlignedPairSeries::slice(std::size_t first, std::size_t count) const {
    AlignedPairSeries out;
    out.symbol_i = symbol_i;
    out.symbol_j = symbol_j;
    out.interval = interval;
    first = std::min(first, size());
    count = std::min(count, size() - first);
    const auto b = static_cast<std::ptrdiff_t>(first);
    const auto e = static_cast<std::ptrdiff_t>(first + count);
    out.timestamps.assign(timestamps.begin() + b, timestamps.begin() + e);
    out.prices_i.assign(prices_i.begin() + b, prices_i.begin() + e);
    out.prices_j.assign(prices_j.begin() + b, prices_j.begin() + e);
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<Candle> parse_klines(std::istream& in, Interval interval) {
    std::vector<Candle> candles;
    std::vector<std::size_t> line_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto fields = split_fields(body);
        if (fields.size() < 6) {
            throw Error(Errc::MalformedRow, "expected at least 6 fields at line " + std::to_string(line_no),
                        line_no);
        }
        Candle c;
        c.interval = interval;
        const auto ts = trim(fields[0]);
        const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), c.open_time);
        if (ec != std::errc{} || ptr != ts.data() + ts.size()) {
            throw Error(Errc::MalformedRow, "bad open_time at line " + std::to_string(line_no), line_no);
        }
        Decimal* targets[] = {&c.open, &c.high, &c.low, &c.close, &c.volume};
        for (std::size_t k = 0; k < 5; ++k) {
            const auto value = Decimal::parse(trim(fields[k + 1]));
            if (!value) {
                throw Error(Errc::MalformedRow,
                            "bad numeric field " + std::to_string(k + 2) + " at line " + std::to_string(line_no),
                            line_no);
            }
            *targets[k] = *value;
        }
        if (const auto why = candle_violation(c); !why.empty()) {
            throw Error(Errc::InvariantViolation, why + " at line " + std::to_string(line_no), line_no);
        }
        candles.push_back(c);
        line_of.push_back(line_no);
    }

    std::vector<std::size_t> order(candles.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return candles[a].open_time < candles[b].open_time; });
    std::vector<Candle> sorted;
    sorted.reserve(candles.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& c = candles[order[k]];
        if (!sorted.empty() && sorted.back().open_time == c.open_time) {
            throw Error(Errc::DuplicateTimestamp,
                        "open_time " + std::to_string(c.open_time) + " repeated at line " +
                            std::to_string(line_of[order[k]]),
                        line_of[order[k]]);
        }
        sorted.push_back(c);
    }
    return sorted;
}

std::vector<Candle> parse_klines(const std::filesystem::path& path, Interval interval) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return parse_klines(in, interval);
}

void write_klines(std::ostream& out, std::span<const Candle> candles) {
    for (const auto& c : candles) {
        out << c.open_time << ',' << c.open.to_string() << ',' << c.high.to_string() << ','
            << c.low.to_string() << ',' << c.close.to_string() << ',' << c.volume.to_string() << '\n';
    }
}

void write_klines(const std::filesystem::path& path, std::span<const Candle> candles) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    write_klines(out, candles);
}

std::vector<Candle> resample(std::span<const Candle> candles, int factor) {
    if (factor != 3 && factor != 5) throw Error(Errc::BadFactor, "factor must be 3 or 5");
    for (std::size_t k = 1; k < candles.size(); ++k) {
        if (candles[k].open_time <= candles[k - 1].open_time) {
            throw Error(Errc::UnsortedInput, "candles must be strictly increasing in open_time");
        }
    }
    const std::int64_t bucket_ms = static_cast<std::int64_t>(factor) * 60'000;
    const Interval out_interval = factor == 3 ? Interval::M3 : Interval::M5;

    std::vector<Candle> out;
    std::size_t k = 0;
    while (k < candles.size()) {
        if (candles[k].interval != Interval::M1) throw Error(Errc::BadFactor, "resample expects 1m input");
        const std::int64_t bucket = candles[k].open_time - (((candles[k].open_time % bucket_ms) + bucket_ms) % bucket_ms);
        std::size_t end = k;
        while (end < candles.size() && candles[end].open_time < bucket + bucket_ms) ++end;
        if (end - k == static_cast<std::size_t>(factor)) {
            Candle bar;
            bar.open_time = bucket;
            bar.interval = out_interval;
            bar.open = candles[k].open;
            bar.close = candles[end - 1].close;
            bar.high = candles[k].high;
            bar.low = candles[k].low;
            for (std::size_t m = k; m < end; ++m) {
                bar.high = std::max(bar.high, candles[m].high);
                bar.low = std::min(bar.low, candles[m].low);
                bar.volume = bar.volume + candles[m].volume;
            }
            out.push_back(bar);
        }
        k = end;
    }
    return out;
}

Decimal empirical_quantile(std::span<const Candle> candles, double q) {
    if (candles.empty()) return Decimal{};
    std::vector<Decimal> volumes;
    volumes.reserve(candles.size());
    for (const auto& c : candles) volumes.push_back(c.volume);
    std::sort(volumes.begin(), volumes.end());
    if (q <= 0.0) return volumes.front();
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(volumes.size())));
    return volumes[std::clamp<std::size_t>(rank, 1, volumes.size()) - 1];
}

AlignedPairSeries align_pair(std::span<const Candle> a, std::span<const Candle> b, double min_volume_quantile,
                             std::string symbol_i, std::string symbol_j) {
    if (!(min_volume_quantile >= 0.0 && min_volume_quantile < 1.0)) {
        throw Error(Errc::InvalidArgument, "min_volume_quantile must lie in [0, 1)");
    }
    AlignedPairSeries out;
    out.symbol_i = std::move(symbol_i);
    out.symbol_j = std::move(symbol_j);
    if (!a.empty()) out.interval = a.front().interval;

    const Decimal floor_a = empirical_quantile(a, min_volume_quantile);
    const Decimal floor_b = empirical_quantile(b, min_volume_quantile);
    const auto keep = [](const Candle& c, Decimal floor) { return c.volume > Decimal{} && c.volume >= floor; };

    bool joined_any = false;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia].open_time < b[ib].open_time) {
            ++ia;
        } else if (b[ib].open_time < a[ia].open_time) {
            ++ib;
        } else {
            joined_any = true;
            if (keep(a[ia], floor_a) && keep(b[ib], floor_b)) {
                out.timestamps.push_back(a[ia].open_time);
                out.prices_i.push_back(a[ia].close.to_double());
                out.prices_j.push_back(b[ib].close.to_double());
            }
            ++ia;
            ++ib;
        }
    }
    if (!joined_any || out.timestamps.empty()) {
        throw Error(Errc::EmptyIntersection, "no common timestamps between " + out.symbol_i + " and " + out.symbol_j);
    }
    return out;
}

}  // namespace pairtrade
