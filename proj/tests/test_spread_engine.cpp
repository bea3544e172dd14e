// test_spread_engine.cpp
// Spread fit, z-score, zone partition and the streaming engine.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pairtrade/econometrics.hpp"
#include "pairtrade/errors.hpp"
#include "pairtrade/spread_engine.hpp"
#include "support/fixtures.hpp"

namespace pairtrade {
namespace {

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

TEST(Thresholds, Validation) {
    EXPECT_NO_THROW((Thresholds{1.8, 0.4}.validate()));
    EXPECT_EQ(error_of([] { Thresholds{0.4, 0.4}.validate(); }), Errc::InvalidArgument);
    EXPECT_EQ(error_of([] { Thresholds{1.0, 0.0}.validate(); }), Errc::InvalidArgument);
}

TEST(FitSpread, ExactProportionalPrices) {
    std::vector<double> pj, pi;
    for (int t = 0; t < 40; ++t) {
        pj.push_back(50.0 + t);
        pi.push_back(2.0 * pj.back());
    }
    const auto m = fit_spread(pi, pj);
    EXPECT_NEAR(m.beta1, 2.0, 1e-12);
    EXPECT_NEAR(m.spread_std, 0.0, 1e-10);
    EXPECT_EQ(error_of([&] { zscore(m, 0.0); }), Errc::DegenerateSpread);
}

TEST(FitSpread, ConstantRegressor) {
    const std::vector<double> pj(10, 3.0);
    const std::vector<double> pi{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(error_of([&] { fit_spread(pi, pj); }), Errc::SingularDesign);
}

TEST(FitSpread, ShortWindow) {
    std::vector<double> pj, pi;
    for (int t = 0; t < 20; ++t) {
        pj.push_back(t);
        pi.push_back(t * t);
    }
    EXPECT_EQ(error_of([&] { fit_spread(pi, pj); }), Errc::WindowTooShort);
}

TEST(FitSpread, MatchesNormalEquations) {
    const auto s = testing::ou_pair(300, 17);
    const std::span<const double> wi(s.prices_i.data() + 100, 120);
    const std::span<const double> wj(s.prices_j.data() + 100, 120);
    const auto m = fit_spread(wi, wj);
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < 120; ++k) {
        mx += wj[k];
        my += wi[k];
    }
    mx /= 120;
    my /= 120;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < 120; ++k) {
        sxy += (wj[k] - mx) * (wi[k] - my);
        sxx += (wj[k] - mx) * (wj[k] - mx);
    }
    const double b1 = sxy / sxx;
    const double b0 = my - b1 * mx;
    EXPECT_NEAR(m.beta1, b1, 1e-9);
    EXPECT_NEAR(m.beta0, b0, 1e-7);
    EXPECT_NEAR(m.latest_spread, wi.back() - b0 - b1 * wj.back(), 1e-8);
    EXPECT_NEAR(m.spread_mean, 0.0, 1e-9);
}

TEST(Zscore, Arithmetic) {
    SpreadModel m;
    m.spread_mean = 0.5;
    m.spread_std = 0.25;
    EXPECT_DOUBLE_EQ(zscore(m, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(zscore(m, 0.75), 1.0);
    EXPECT_DOUBLE_EQ(zscore(m, 1.25), 3.0);
}

TEST(ClassifyZone, Examples) {
    const Thresholds t{1.8, 0.4};
    EXPECT_EQ(classify_zone(2.0, t), Zone::ShortZone);
    EXPECT_EQ(classify_zone(0.0, t), Zone::CloseZone);
    EXPECT_EQ(classify_zone(-1.0, t), Zone::NeutralLongZone);
}

TEST(ClassifyZone, BoundaryAssignment) {
    const Thresholds t{1.8, 0.4};
    EXPECT_EQ(classify_zone(1.8, t), Zone::ShortZone);
    EXPECT_EQ(classify_zone(0.4, t), Zone::NeutralShortZone);
    EXPECT_EQ(classify_zone(-0.4, t), Zone::NeutralLongZone);
    EXPECT_EQ(classify_zone(-1.8, t), Zone::LongZone);
    EXPECT_EQ(classify_zone(std::nextafter(0.4, 0.0), t), Zone::CloseZone);
    EXPECT_EQ(classify_zone(std::nextafter(1.8, 0.0), t), Zone::NeutralShortZone);
}

TEST(ClassifyZone, MirrorSymmetryAwayFromBoundaries) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> z(-5, 5);
    const Thresholds t{1.5, 0.5};
    for (int k = 0; k < 10000; ++k) {
        const double v = z(rng);
        if (std::abs(std::abs(v) - t.open) < 1e-12 || std::abs(std::abs(v) - t.close) < 1e-12) continue;
        EXPECT_EQ(classify_zone(-v, t), mirror(classify_zone(v, t)));
    }
}

TEST(ClassifyZone, MonotoneInZ) {
    const Thresholds t{2.0, 0.3};
    int prev = 0;
    for (int k = -4000; k <= 4000; ++k) {
        const int zone = static_cast<int>(classify_zone(-k / 1000.0, t));
        EXPECT_GE(zone, prev);
        prev = zone;
    }
}

TEST(SpreadEngine, WarmupBoundary) {
    const auto s = testing::ou_pair(80, 4);
    SpreadEngine engine(50, {1.8, 0.4});
    std::size_t emitted = 0;
    for (std::size_t t = 0; t < 50; ++t) emitted += engine.push(s.timestamps[t], s.prices_i[t], s.prices_j[t]) ? 1 : 0;
    EXPECT_EQ(emitted, 1u);
    EXPECT_TRUE(engine.warm());
    for (std::size_t t = 50; t < 80; ++t) emitted += engine.push(s.timestamps[t], s.prices_i[t], s.prices_j[t]) ? 1 : 0;
    EXPECT_EQ(emitted, 31u);
}

TEST(SpreadEngine, AdvanceThrowsWhileCold) {
    SpreadEngine engine(30, {1.8, 0.4});
    EXPECT_EQ(error_of([&] { engine.advance(0, 1.0, 1.0); }), Errc::NotWarm);
}

TEST(SpreadEngine, RejectsShortWindow) {
    EXPECT_EQ(error_of([] { SpreadEngine(10, {1.8, 0.4}); }), Errc::WindowTooShort);
}

TEST(SpreadEngine, StreamingEqualsBatchFit) {
    const auto s = testing::ou_pair(400, 9);
    const std::size_t w = 120;
    SpreadEngine engine(w, {1.8, 0.4}, FitMode::Refit);
    for (std::size_t t = 0; t < s.size(); ++t) {
        const auto obs = engine.push(s.timestamps[t], s.prices_i[t], s.prices_j[t]);
        if (t + 1 < w) continue;
        const std::span<const double> wi(s.prices_i.data() + t + 1 - w, w);
        const std::span<const double> wj(s.prices_j.data() + t + 1 - w, w);
        const auto m = fit_spread(wi, wj);
        ASSERT_TRUE(obs);
        EXPECT_EQ(obs->z, zscore(m, m.latest_spread));
    }
}

TEST(SpreadEngine, IncrementalMatchesRefit) {
    const auto s = testing::ou_pair(3000, 21);
    const auto refit = compute_spread_trace(s, 200, {1.8, 0.4}, FitMode::Refit);
    const auto incr = compute_spread_trace(s, 200, {1.8, 0.4}, FitMode::Incremental);
    double worst = 0.0;
    for (std::size_t t = refit.first_ready(); t < s.size(); ++t) {
        worst = std::max(worst, std::abs(refit.observations[t]->z - incr.observations[t]->z));
    }
    EXPECT_LT(worst, 1e-8);
}

// p_i - 2 p_j - 10 = 4 sin(2 pi t / 40); over W = 200 the fit is exact and
// z_t = sqrt(2) sin(2 pi t / 40).
TEST(SpreadEngine, SinusoidZoneTimesAreAnalytic) {
    const auto s = testing::periodic_pair(600, 40, 25);
    const Thresholds t{1.2, 0.3};
    const auto trace = compute_spread_trace(s, 200, t, FitMode::Refit);
    for (std::size_t k = trace.first_ready(); k < s.size(); ++k) {
        const auto& obs = trace.observations[k];
        ASSERT_TRUE(obs);
        const double z = std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / 40.0);
        EXPECT_NEAR(obs->z, z, 1e-6);
        const std::size_t phase = k % 40;
        Zone expected;
        if (phase >= 7 && phase <= 13) {
            expected = Zone::ShortZone;
        } else if (phase >= 27 && phase <= 33) {
            expected = Zone::LongZone;
        } else if (phase == 39 || phase <= 1 || (phase >= 19 && phase <= 21)) {
            expected = Zone::CloseZone;
        } else {
            expected = phase < 20 ? Zone::NeutralShortZone : Zone::NeutralLongZone;
        }
        EXPECT_EQ(obs->zone, expected) << "t=" << k;
    }
}

TEST(SpreadTrace, CsvHasOneRowPerReadyIndex) {
    const auto s = testing::ou_pair(100, 2);
    const auto trace = compute_spread_trace(s, 60, {1.8, 0.4});
    std::ostringstream out;
    write_spread_trace(out, trace);
    const std::string text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 41);
    EXPECT_EQ(text.rfind("timestamp,spread,z,zone\n", 0), 0u);
}

}  // namespace
}  // namespace pairtrade
