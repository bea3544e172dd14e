// test_core.cpp
// Error categories and fixed-point decimal parsing.

#include <gtest/gtest.h>

#include "pairtrade/decimal.hpp"
#include "pairtrade/errors.hpp"

namespace pairtrade {
namespace {

TEST(Errors, CategoriesMapToExitGroups) {
    EXPECT_EQ(category_of(Errc::MalformedRow), ErrorCategory::Data);
    EXPECT_EQ(category_of(Errc::CheckpointFormat), ErrorCategory::Data);
    EXPECT_EQ(category_of(Errc::ZeroVariance), ErrorCategory::Numeric);
    EXPECT_EQ(category_of(Errc::ZeroVolatility), ErrorCategory::Numeric);
    EXPECT_EQ(category_of(Errc::ConfigError), ErrorCategory::Config);
    EXPECT_EQ(category_of(Errc::StaleArtifact), ErrorCategory::Config);
}

TEST(Errors, CarriesCodeAndLine) {
    const Error e(Errc::MalformedRow, "bad row", 7);
    EXPECT_EQ(e.code(), Errc::MalformedRow);
    EXPECT_EQ(e.line(), 7u);
    EXPECT_STREQ(e.what(), "MalformedRow: bad row");
    EXPECT_EQ(to_string(Errc::EpisodeFinished), "EpisodeFinished");
}

TEST(Decimal, ParsesPlainAndFractional) {
    EXPECT_EQ(Decimal::parse("39050")->units(), 39050 * Decimal::kScale);
    EXPECT_EQ(Decimal::parse("12.5")->units(), 1'250'000'000);
    EXPECT_EQ(Decimal::parse("-0.00000001")->units(), -1);
    EXPECT_EQ(Decimal::parse("+1.25")->to_string(), "1.25");
    EXPECT_EQ(Decimal::parse("1.1000000000")->to_string(), "1.1");
}

TEST(Decimal, RejectsMalformed) {
    EXPECT_FALSE(Decimal::parse(""));
    EXPECT_FALSE(Decimal::parse("abc"));
    EXPECT_FALSE(Decimal::parse("1.2.3"));
    EXPECT_FALSE(Decimal::parse("0.000000001"));
    EXPECT_FALSE(Decimal::parse("99999999999999999999"));
}

TEST(Decimal, RoundTripsThroughString) {
    for (const char* text : {"0", "0.5", "-1.25", "39050", "0.00012345", "123456.78901234"}) {
        const auto d = Decimal::parse(text);
        ASSERT_TRUE(d) << text;
        EXPECT_EQ(d->to_string(), text);
        EXPECT_EQ(Decimal::parse(d->to_string()), d);
    }
}

TEST(Decimal, AdditionIsExact) {
    const auto a = *Decimal::parse("0.1");
    const auto b = *Decimal::parse("0.2");
    EXPECT_EQ(a + b, *Decimal::parse("0.3"));
    EXPECT_LT(a, b);
}

}  // namespace
}  // namespace pairtrade
