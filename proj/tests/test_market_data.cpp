// test_market_data.cpp
// Kline parsing, resampling and pair alignment.

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pairtrade/errors.hpp"
#include "pairtrade/market_data.hpp"
#include "support/fixtures.hpp"

namespace pairtrade {
namespace {

constexpr std::int64_t kT0 = 1701388800000;  // 2023-12-01 00:00 UTC

Candle make_candle(std::int64_t t, const char* o, const char* h, const char* l, const char* c, const char* v,
                   Interval interval = Interval::M1) {
    return Candle{t, *Decimal::parse(o), *Decimal::parse(h), *Decimal::parse(l), *Decimal::parse(c),
                  *Decimal::parse(v), interval};
}

std::vector<Candle> parse_text(const std::string& text, Interval interval = Interval::M1) {
    std::istringstream in(text);
    return parse_klines(in, interval);
}

template <class Fn>
Errc error_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::InvalidArgument;
}

TEST(Interval, ParsesAndRenders) {
    EXPECT_EQ(parse_interval("3m"), Interval::M3);
    EXPECT_EQ(interval_ms(Interval::M5), 300000);
    EXPECT_EQ(to_string(Interval::M1), "1m");
    EXPECT_EQ(error_of([] { parse_interval("15m"); }), Errc::ConfigError);
}

TEST(ParseKlines, EmptyInputGivesEmptySequence) { EXPECT_TRUE(parse_text("").empty()); }

TEST(ParseKlines, MapsFields) {
    const auto candles =
        parse_text("1701388800000,39000,39100,38950,39050,12.5,1701388859999,488000,100,6,234000,0\n");
    ASSERT_EQ(candles.size(), 1u);
    EXPECT_EQ(candles[0].open_time, kT0);
    EXPECT_EQ(candles[0].close.to_string(), "39050");
    EXPECT_EQ(candles[0].volume.to_string(), "12.5");
    EXPECT_EQ(candles[0].high.to_string(), "39100");
}

TEST(ParseKlines, DuplicateTimestamp) {
    EXPECT_EQ(error_of([] {
                  parse_text("1701388800000,1,1,1,1,1\n1701388800000,1,1,1,1,1\n");
              }),
              Errc::DuplicateTimestamp);
}

TEST(ParseKlines, MalformedRowReportsLine) {
    try {
        parse_text("1701388800000,1,1,1,1,1\n1701388860000,1,x,1,1,1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MalformedRow);
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_EQ(error_of([] { parse_text("1701388800000,1,1,1\n"); }), Errc::MalformedRow);
}

TEST(ParseKlines, InvariantViolations) {
    // high below close
    EXPECT_EQ(error_of([] { parse_text("1701388800000,1,1,1,2,1\n"); }), Errc::InvariantViolation);
    // negative volume
    EXPECT_EQ(error_of([] { parse_text("1701388800000,1,1,1,1,-1\n"); }), Errc::InvariantViolation);
    // not aligned to the interval
    EXPECT_EQ(error_of([] { parse_text("1701388800001,1,1,1,1,1\n"); }), Errc::InvariantViolation);
}

TEST(ParseKlines, OutputSortedAndRoundTrips) {
    const auto candles = parse_text("1701388860000,2,3,1,2,4\n1701388800000,1,2,0.5,1.5,1\n");
    ASSERT_EQ(candles.size(), 2u);
    EXPECT_LT(candles[0].open_time, candles[1].open_time);
    std::ostringstream out;
    write_klines(out, candles);
    const auto again = parse_text(out.str());
    ASSERT_EQ(again.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(again[k].open_time, candles[k].open_time);
        EXPECT_EQ(again[k].close, candles[k].close);
        EXPECT_EQ(again[k].volume, candles[k].volume);
    }
}

TEST(Resample, AggregatesThreeMinutes) {
    const std::vector<Candle> in{make_candle(kT0, "1", "2", "0.5", "1.5", "1"),
                                 make_candle(kT0 + 60000, "1.5", "3", "1", "2", "2"),
                                 make_candle(kT0 + 120000, "2", "2.5", "1.8", "2.2", "3")};
    const auto out = resample(in, 3);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].open_time, kT0);
    EXPECT_EQ(out[0].interval, Interval::M3);
    EXPECT_EQ(out[0].open.to_string(), "1");
    EXPECT_EQ(out[0].high.to_string(), "3");
    EXPECT_EQ(out[0].low.to_string(), "0.5");
    EXPECT_EQ(out[0].close.to_string(), "2.2");
    EXPECT_EQ(out[0].volume.to_string(), "6");
    EXPECT_TRUE(candle_violation(out[0]).empty());
}

TEST(Resample, PartialGroupDropped) {
    const std::vector<Candle> in{make_candle(kT0, "1", "1", "1", "1", "1"),
                                 make_candle(kT0 + 60000, "1", "1", "1", "1", "1")};
    EXPECT_TRUE(resample(in, 3).empty());
}

TEST(Resample, ConservesVolume) {
    std::vector<Candle> in;
    Decimal total;
    for (int k = 0; k < 9; ++k) {
        const std::string v = std::to_string(k + 1) + ".25";
        in.push_back(make_candle(kT0 + k * 60000, "1", "1", "1", "1", v.c_str()));
        total = total + in.back().volume;
    }
    const auto out = resample(in, 3);
    ASSERT_EQ(out.size(), 3u);
    Decimal sum;
    for (const auto& c : out) sum = sum + c.volume;
    EXPECT_EQ(sum, total);
}

TEST(Resample, GroupWithGapDropped) {
    std::vector<Candle> in;
    for (int k : {0, 1, 2, 3, 5, 6, 7, 8}) in.push_back(make_candle(kT0 + k * 60000, "1", "1", "1", "1", "1"));
    const auto out = resample(in, 3);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].open_time, kT0);
    EXPECT_EQ(out[1].open_time, kT0 + 6 * 60000);
}

TEST(Resample, RejectsBadInput) {
    const std::vector<Candle> in{make_candle(kT0, "1", "1", "1", "1", "1")};
    EXPECT_EQ(error_of([&] { resample(in, 4); }), Errc::BadFactor);
    const std::vector<Candle> unsorted{make_candle(kT0 + 60000, "1", "1", "1", "1", "1"),
                                       make_candle(kT0, "1", "1", "1", "1", "1")};
    EXPECT_EQ(error_of([&] { resample(unsorted, 3); }), Errc::UnsortedInput);
}

std::vector<Candle> leg(std::span<const double> volumes, std::int64_t offset = 0) {
    std::vector<Candle> out;
    for (std::size_t k = 0; k < volumes.size(); ++k) {
        const std::string v = std::to_string(volumes[k]);
        out.push_back(make_candle(kT0 + offset + static_cast<std::int64_t>(k) * 60000, "1", "1", "1",
                                  std::to_string(1.0 + 0.01 * static_cast<double>(k)).c_str(), v.c_str()));
    }
    return out;
}

TEST(AlignPair, IdenticalTimestampsKeepEverything) {
    const std::vector<double> v(50, 2.0);
    const auto a = leg(v);
    const auto b = leg(v);
    const auto s = align_pair(a, b, 0.0, "A", "B");
    EXPECT_EQ(s.size(), 50u);
    EXPECT_EQ(s.pair_name(), "A-B");
    EXPECT_DOUBLE_EQ(s.prices_i[3], 1.03);
}

TEST(AlignPair, DisjointTimestamps) {
    const std::vector<double> v(5, 1.0);
    const auto a = leg(v);
    const auto b = leg(v, 3'600'000);
    EXPECT_EQ(error_of([&] { align_pair(a, b); }), Errc::EmptyIntersection);
}

TEST(AlignPair, ZeroVolumeRowsDropped) {
    const std::vector<double> va{1, 0, 1, 1};
    const std::vector<double> vb{1, 1, 1, 0};
    const auto s = align_pair(leg(va), leg(vb));
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.timestamps[0], kT0);
    EXPECT_EQ(s.timestamps[1], kT0 + 120000);
}

TEST(AlignPair, QuantileFilterMatchesOracle) {
    const auto dir = testing::data_dir() / "metrics";
    const auto expected = nlohmann::json::parse(testing::slurp(dir / "expected.json"))["volume_fixture"];
    const auto xy = testing::read_xy(dir / "volumes_100.csv");
    const auto s = align_pair(leg(xy.x), leg(xy.y), expected["quantile"].get<double>());
    EXPECT_EQ(s.size(), expected["retained"].get<std::size_t>());
    EXPECT_GE(s.size(), 50u);
    EXPECT_LE(s.size(), 100u);
}

TEST(AlignPair, EmpiricalQuantileIsLowerInverse) {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const auto candles = leg(v);
    EXPECT_EQ(empirical_quantile(candles, 0.0).to_string(), "1");
    EXPECT_EQ(empirical_quantile(candles, 0.25).to_string(), "25");
    EXPECT_EQ(empirical_quantile(candles, 0.251).to_string(), "26");
}

TEST(AlignedPairSeries, Slicing) {
    const auto s = testing::periodic_pair(100, 40, 25);
    const auto t = s.slice_time(s.timestamps[10], s.timestamps[20]);
    EXPECT_EQ(t.size(), 10u);
    EXPECT_EQ(t.timestamps.front(), s.timestamps[10]);
    const auto u = s.slice(90, 10);
    EXPECT_EQ(u.prices_i.back(), s.prices_i.back());
}

}  // namespace
}  // namespace pairtrade
