// test_rl_environment.cpp
// Trading MDPs: reset/step semantics, reward components and the wire protocol.

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pairtrade/errors.hpp"
#include "pairtrade/rl_environment.hpp"
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

std::shared_ptr<const AlignedPairSeries> ou_series(std::size_t n = 600, std::uint64_t seed = 5) {
    return std::make_shared<const AlignedPairSeries>(testing::ou_pair(n, seed));
}

EnvConfig small_config(EnvMode mode, RewardVariant variant = RewardVariant::Shaped) {
    EnvConfig cfg;
    cfg.mode = mode;
    cfg.variant = variant;
    cfg.window = 60;
    cfg.thresholds = {1.5, 0.5};
    return cfg;
}

EnvAction random_action(std::mt19937_64& rng, EnvMode mode) {
    if (mode == EnvMode::RL1) return static_cast<DiscreteAction>(std::uniform_int_distribution<int>(0, 2)(rng));
    return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

TEST(Rewards, PlainFormulas) {
    EXPECT_EQ(plain_reward_rl2(5.0, 0.5, 0.2), 2.3);
    EXPECT_EQ(plain_reward_rl1(7.0, 0.3, false), 0.0);
    EXPECT_EQ(plain_reward_rl1(7.0, 0.5, true), 6.5);
}

TEST(Rewards, ShapedIsWeightedSum) {
    const RewardBreakdown b{0.02, 1.0, 0.3, -0.3};
    const RewardWeights w{1.0, 0.1, 0.5};
    EXPECT_EQ(shaped_reward(b, w), 1.0 * 0.02 + 0.1 * 1.0 - 0.5 * 0.3);
}

TEST(Rewards, ActionScoreFollowsZoneTable) {
    EXPECT_EQ(action_score(Zone::ShortZone, -1), 1.0);
    EXPECT_EQ(action_score(Zone::ShortZone, 1), -1.0);
    EXPECT_EQ(action_score(Zone::LongZone, 1), 1.0);
    EXPECT_EQ(action_score(Zone::CloseZone, 0), 1.0);
    EXPECT_EQ(action_score(Zone::CloseZone, -1), -1.0);
    EXPECT_EQ(action_score(Zone::NeutralLongZone, 1), 0.0);
    EXPECT_EQ(action_score(Zone::NeutralShortZone, -1), 0.0);
}

// With only the action weight the reward-maximising choice in every
// non-neutral zone is the rule strategy's choice.
TEST(Rewards, ActionOnlyArgmaxEqualsRuleStrategy) {
    const RewardWeights w{0.0, 1000.0, 0.0};
    for (Zone zone : {Zone::ShortZone, Zone::CloseZone, Zone::LongZone}) {
        for (double p : {-1.0, -0.4, 0.0, 0.6, 1.0}) {
            int best = 0;
            double best_reward = -1e300;
            for (int dir : {-1, 0, 1}) {
                const double r = shaped_reward({0.0, action_score(zone, dir), 0.0, 0.0}, w);
                if (r > best_reward) {
                    best_reward = r;
                    best = dir;
                }
            }
            const double target = gatev_policy({p, 0.0, zone}).target;
            const int rule = target > 0.0 ? 1 : (target < 0.0 ? -1 : 0);
            EXPECT_EQ(best, rule) << to_string(zone) << " P=" << p;
        }
    }
}

TEST(DiscountedReturn, Examples) {
    const std::vector<double> ones3{1, 1, 1};
    const std::vector<double> ones2{1, 1};
    EXPECT_EQ(discounted_return(ones3, 0.0), 1.0);
    EXPECT_EQ(discounted_return(ones2, 0.5), 1.5);
}

TEST(DiscountedReturn, MatchesBruteForce) {
    std::mt19937_64 rng(100);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> r(100);
    for (auto& x : r) x = n(rng);
    double brute = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) brute += std::pow(0.97, static_cast<double>(k)) * r[k];
    EXPECT_NEAR(discounted_return(r, 0.97), brute, 1e-12);
}

TEST(EnvConfig, Validation) {
    auto cfg = small_config(EnvMode::RL1);
    cfg.window = 10;
    EXPECT_EQ(error_of([&] { cfg.validate(); }), Errc::WindowTooShort);
    EXPECT_EQ(parse_env_mode("rl2"), EnvMode::RL2);
    EXPECT_EQ(parse_reward_variant("plain"), RewardVariant::Plain);
    EXPECT_EQ(error_of([] { parse_env_mode("rl3"); }), Errc::ConfigError);
}

TEST(TradingEnv, ResetStartsFlatAndIsDeterministic) {
    TradingEnv env(ou_series(), small_config(EnvMode::RL1));
    const auto a = env.reset(3);
    EXPECT_EQ(a.position, 0.0);
    EXPECT_EQ(env.cursor(), 59u);
    const auto b = env.reset(3);
    EXPECT_EQ(a.z, b.z);
    EXPECT_EQ(a.zone, b.zone);
}

TEST(TradingEnv, SeriesOfExactlyWindowEndsAfterOneStep) {
    TradingEnv env(ou_series(60), small_config(EnvMode::RL1));
    env.reset();
    EXPECT_EQ(env.cursor(), 59u);
    const auto r = env.step(DiscreteAction::Close);
    EXPECT_TRUE(r.done);
    EXPECT_EQ(error_of([&] { env.step(DiscreteAction::Close); }), Errc::EpisodeFinished);
}

TEST(TradingEnv, RejectsShortSeries) {
    EXPECT_EQ(error_of([] { TradingEnv(ou_series(40), small_config(EnvMode::RL1)); }), Errc::SeriesTooShort);
}

TEST(TradingEnv, ActionTypeMustMatchMode) {
    TradingEnv rl1(ou_series(), small_config(EnvMode::RL1));
    rl1.reset();
    EXPECT_EQ(error_of([&] { rl1.step(0.5); }), Errc::InvalidArgument);
    TradingEnv rl2(ou_series(), small_config(EnvMode::RL2));
    rl2.reset();
    EXPECT_EQ(error_of([&] { rl2.step(DiscreteAction::Close); }), Errc::InvalidArgument);
    EXPECT_EQ(error_of([&] { rl2.step(1.5); }), Errc::TargetOutOfRange);
}

TEST(TradingEnv, ShortZoneShortActionIsRewarded) {
    const auto series = ou_series(2000, 8);
    TradingEnv env(series, small_config(EnvMode::RL1));
    env.reset();
    bool seen = false;
    while (!env.done()) {
        const Zone zone = env.observation().zone;
        const auto r = env.step(zone == Zone::ShortZone ? DiscreteAction::OpenShortLeg : DiscreteAction::Close);
        if (zone == Zone::ShortZone) {
            EXPECT_EQ(r.breakdown.action, 1.0);
            seen = true;
        }
    }
    EXPECT_TRUE(seen);
}

TEST(TradingEnv, TransactionComponentIsGapMagnitude) {
    auto cfg = small_config(EnvMode::RL2);
    cfg.fee.rate = 0.0;
    TradingEnv env(ou_series(), cfg);
    env.reset();
    env.step(0.7);
    const double p = env.observation().position;
    const auto r = env.step(0.8);
    EXPECT_EQ(r.breakdown.transaction, std::abs(0.8 - p));
    EXPECT_EQ(r.breakdown.signed_gap, p - 0.8);
}

TEST(TradingEnv, RewardDecompositionHoldsEveryStep) {
    std::mt19937_64 rng(77);
    const auto series = ou_series(800, 6);
    for (EnvMode mode : {EnvMode::RL1, EnvMode::RL2}) {
        for (RewardVariant variant : {RewardVariant::Shaped, RewardVariant::Plain}) {
            TradingEnv env(series, small_config(mode, variant));
            for (int episode = 0; episode < 5; ++episode) {
                env.reset(episode);
                while (!env.done()) {
                    const auto action = random_action(rng, mode);
                    const auto r = env.step(action);
                    if (variant == RewardVariant::Shaped) {
                        EXPECT_EQ(r.reward, shaped_reward(r.breakdown, env.config().weights));
                    } else if (mode == EnvMode::RL1) {
                        if (r.info.fees == 0.0 && r.breakdown.transaction == 0.0) EXPECT_EQ(r.reward, 0.0);
                    } else {
                        const double a = std::get<double>(action);
                        EXPECT_EQ(r.reward, plain_reward_rl2(r.info.delta_pnl, a, r.info.fees) / 10000.0);
                    }
                }
            }
        }
    }
}

TEST(TradingEnv, IdenticalSeedAndActionsReplayIdentically) {
    auto cfg = small_config(EnvMode::RL2);
    cfg.random_start = true;
    cfg.episode_length = 100;
    TradingEnv a(ou_series(), cfg), b(ou_series(), cfg);
    a.reset(11);
    b.reset(11);
    EXPECT_EQ(a.cursor(), b.cursor());
    std::mt19937_64 rng(1);
    std::size_t steps = 0;
    while (!a.done()) {
        const double act = std::uniform_real_distribution<double>(-1, 1)(rng);
        const auto ra = a.step(act);
        const auto rb = b.step(act);
        EXPECT_EQ(ra.reward, rb.reward);
        EXPECT_EQ(ra.observation.z, rb.observation.z);
        EXPECT_EQ(ra.info.value, rb.info.value);
        ++steps;
    }
    EXPECT_EQ(steps, 100u);
}

TEST(TradingEnv, RandomStartDependsOnSeed) {
    auto cfg = small_config(EnvMode::RL1);
    cfg.random_start = true;
    cfg.episode_length = 50;
    TradingEnv env(ou_series(2000), cfg);
    std::set<std::size_t> starts;
    for (std::uint64_t s = 0; s < 20; ++s) {
        env.reset(s);
        EXPECT_GE(env.cursor(), 59u);
        EXPECT_LE(env.cursor(), 2000u - 1 - 50);
        starts.insert(env.cursor());
    }
    EXPECT_GT(starts.size(), 10u);
}

TEST(TradingEnv, FlatAgentKeepsCash) {
    auto cfg = small_config(EnvMode::RL2);
    TradingEnv env(ou_series(), cfg);
    env.reset();
    while (!env.done()) env.step(0.0);
    EXPECT_EQ(env.equity().values.back(), 10000.0);
    EXPECT_EQ(cumulative_return(env.equity()), 0.0);
    // every ready index except the last, whose step has no next price to value against
    EXPECT_EQ(env.episode_trace().size(), env.ready_steps() - 1);
}

TEST(TradingEnv, PortfolioComponentIsRealizedPnlAtClose) {
    auto cfg = small_config(EnvMode::RL1);
    TradingEnv env(ou_series(), cfg);
    env.reset();
    env.step(DiscreteAction::OpenLongLeg);
    const auto hold = env.step(DiscreteAction::OpenLongLeg);
    EXPECT_EQ(hold.breakdown.portfolio, 0.0);
    EXPECT_FALSE(hold.info.trade_closed);
    const auto close = env.step(DiscreteAction::Close);
    ASSERT_TRUE(close.info.trade_closed);
    EXPECT_EQ(close.breakdown.portfolio, close.info.realized_pnl / 10000.0);
    EXPECT_EQ(close.info.realized_pnl, env.portfolio().trades().back().realized_pnl);
}

TEST(TradingEnv, EpisodeTraceCsv) {
    TradingEnv env(ou_series(100), small_config(EnvMode::RL1));
    env.reset();
    while (!env.done()) env.step(DiscreteAction::Close);
    std::ostringstream out;
    write_episode_trace(out, env.episode_trace());
    const std::string text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 40);
}

std::vector<nlohmann::json> replies(TradingEnv& env, const std::string& script) {
    std::istringstream in(script);
    std::ostringstream out;
    serve_external(env, in, out);
    std::vector<nlohmann::json> lines;
    std::istringstream back(out.str());
    std::string line;
    while (std::getline(back, line)) lines.push_back(nlohmann::json::parse(line));
    return lines;
}

TEST(ServeExternal, ResetReplyStartsFlat) {
    TradingEnv env(ou_series(), small_config(EnvMode::RL1));
    const auto r = replies(env, "{\"cmd\":\"reset\"}\n{\"cmd\":\"close\"}\n{\"cmd\":\"reset\"}\n");
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0]["obs"][0].get<double>(), 0.0);
    EXPECT_GE(r[0]["obs"][2].get<int>(), 0);
    EXPECT_LE(r[0]["obs"][2].get<int>(), 4);
}

TEST(ServeExternal, StepAfterDone) {
    TradingEnv env(ou_series(60), small_config(EnvMode::RL1));
    const auto r = replies(env, "{\"cmd\":\"reset\"}\n{\"cmd\":\"step\",\"action\":0}\n{\"cmd\":\"step\",\"action\":0}\n");
    ASSERT_EQ(r.size(), 3u);
    EXPECT_TRUE(r[1]["done"].get<bool>());
    EXPECT_EQ(r[2], nlohmann::json::parse("{\"error\":\"EpisodeFinished\"}"));
}

TEST(ServeExternal, MalformedInputKeepsSessionAlive) {
    TradingEnv env(ou_series(), small_config(EnvMode::RL1));
    const auto r = replies(env, "not json\n{\"cmd\":\"dance\"}\n{\"cmd\":\"reset\"}\n{\"cmd\":\"step\",\"action\":7}\n");
    ASSERT_EQ(r.size(), 4u);
    EXPECT_EQ(r[0]["error"], "ProtocolError");
    EXPECT_EQ(r[1]["error"], "ProtocolError");
    EXPECT_TRUE(r[2].contains("obs"));
    EXPECT_EQ(r[3]["error"], "ProtocolError");
}

TEST(ServeExternal, TranscriptMatchesInProcessRun) {
    for (EnvMode mode : {EnvMode::RL1, EnvMode::RL2}) {
        auto cfg = small_config(mode);
        cfg.random_start = true;
        cfg.episode_length = 80;
        const auto series = ou_series(400, 13);
        std::mt19937_64 rng(5);
        std::vector<EnvAction> actions;
        std::string script = "{\"cmd\":\"reset\",\"seed\":42}\n";
        for (int k = 0; k < 80; ++k) {
            actions.push_back(random_action(rng, mode));
            nlohmann::json step{{"cmd", "step"}};
            if (mode == EnvMode::RL1) {
                step["action"] = static_cast<int>(std::get<DiscreteAction>(actions.back())) == 0   ? 1
                                 : static_cast<int>(std::get<DiscreteAction>(actions.back())) == 1 ? 0
                                                                                                   : -1;
            } else {
                step["action"] = std::get<double>(actions.back());
            }
            script += step.dump() + "\n";
        }
        script += "{\"cmd\":\"close\"}\n";

        TradingEnv wire_env(series, cfg);
        const auto r = replies(wire_env, script);
        ASSERT_EQ(r.size(), 81u);

        TradingEnv local(series, cfg);
        const auto first = local.reset(42);
        EXPECT_EQ(r[0]["obs"][1].get<double>(), first.z);
        for (std::size_t k = 0; k < actions.size(); ++k) {
            const auto s = local.step(actions[k]);
            EXPECT_EQ(r[k + 1]["reward"].get<double>(), s.reward) << "step " << k;
            EXPECT_EQ(r[k + 1]["done"].get<bool>(), s.done);
            EXPECT_EQ(r[k + 1]["obs"][0].get<double>(), s.observation.position);
        }
    }
}

}  // namespace
}  // namespace pairtrade
