// rl_environment.hpp
// Pair-trading MDPs: RL1 picks the timing of full-size legs, RL2 picks a
// continuous target position. Shaped and plain reward variants, plus a
// line-delimited JSON protocol for external agents.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "pairtrade/market_data.hpp"
#include "pairtrade/metrics.hpp"
#include "pairtrade/policies.hpp"
#include "pairtrade/portfolio.hpp"
#include "pairtrade/spread_engine.hpp"

namespace pairtrade {

enum class EnvMode { RL1, RL2 };
enum class RewardVariant { Shaped, Plain };

std::string_view to_string(EnvMode mode) noexcept;
std::string_view to_string(RewardVariant variant) noexcept;
EnvMode parse_env_mode(std::string_view text);
RewardVariant parse_reward_variant(std::string_view text);

struct RewardWeights {
    double portfolio = 1.0;
    double action = 0.1;
    double transaction = 0.1;

    void validate() const;
};

struct EnvConfig {
    EnvMode mode = EnvMode::RL1;
    Thresholds thresholds{};
    std::size_t window = 900;
    FeeModel fee{};
    double gamma = 0.99;
    RewardWeights weights{};
    RewardVariant variant = RewardVariant::Shaped;
    double initial_cash = 10000.0;
    std::uint64_t seed = 0;
    // 0 runs to the end of the series.
    std::size_t episode_length = 0;
    // Start each episode at a seeded random ready index (needs episode_length > 0).
    bool random_start = false;
    // RL2 actions with |a| at or below this count as "close" when scoring behaviour.
    double flat_band = 0.05;

    void validate() const;
};

enum class DiscreteAction { OpenLongLeg = 0, Close = 1, OpenShortLeg = 2 };

std::string_view to_string(DiscreteAction action) noexcept;

using EnvAction = std::variant<DiscreteAction, double>;

struct RewardBreakdown {
    double portfolio = 0.0;    // realized P&L at close over initial cash
    double action = 0.0;       // -1, 0 or +1
    double transaction = 0.0;  // |target - P|
    double signed_gap = 0.0;   // P - target, logged only
};

struct StepInfo {
    double delta_pnl = 0.0;  // V change over the step, excluding this step's fees
    double fees = 0.0;
    bool trade_closed = false;
    double realized_pnl = 0.0;
    double target = 0.0;
    double value = 0.0;  // V after the step
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    RewardBreakdown breakdown;
    StepInfo info;
};

// Plain rewards in quote units: r1 = dP - c when a trade executed else 0,
// r2 = dP * a - c.
double plain_reward_rl1(double delta_pnl, double fees, bool traded);
double plain_reward_rl2(double delta_pnl, double action, double fees);
double shaped_reward(const RewardBreakdown& breakdown, const RewardWeights& weights);

// The behaviour a zone rewards: -1 short leg, 0 close, +1 long leg; nullopt in neutral zones.
std::optional<int> rewarded_direction(Zone zone);
// +1 matches, -1 contradicts, 0 in neutral zones.
double action_score(Zone zone, int action_direction);

double discounted_return(std::span<const double> rewards, double gamma);

struct EpisodeTraceRow {
    std::int64_t timestamp = 0;
    double z = 0.0;
    Zone zone = Zone::CloseZone;
    double action = 0.0;
    double target = 0.0;
    double reward = 0.0;
    RewardBreakdown breakdown;
    double value = 0.0;
};

class TradingEnv {
public:
    TradingEnv(std::shared_ptr<const AlignedPairSeries> series, EnvConfig config);
    // Shares a precomputed trace; the trace window must equal config.window.
    TradingEnv(std::shared_ptr<const AlignedPairSeries> series, std::shared_ptr<const SpreadTrace> trace,
               EnvConfig config);

    Observation reset(std::optional<std::uint64_t> seed = std::nullopt);
    StepResult step(const EnvAction& action);

    bool done() const noexcept { return done_; }
    const EnvConfig& config() const noexcept { return config_; }
    const Portfolio& portfolio() const noexcept { return portfolio_; }
    const Observation& observation() const noexcept { return observation_; }
    std::size_t cursor() const noexcept { return cursor_; }
    std::size_t ready_steps() const noexcept;
    const std::shared_ptr<const SpreadTrace>& trace() const noexcept { return trace_; }

    // Equity after reset and after each step; position fraction after each step.
    const EquityCurve& equity() const noexcept { return equity_; }
    const std::vector<double>& position_fractions() const noexcept { return fractions_; }
    const std::vector<EpisodeTraceRow>& episode_trace() const noexcept { return rows_; }

private:
    Observation observe(std::size_t index) const;
    double target_for(const EnvAction& action, double position) const;

    std::shared_ptr<const AlignedPairSeries> series_;
    std::shared_ptr<const SpreadTrace> trace_;
    EnvConfig config_;
    std::mt19937_64 rng_;
    Portfolio portfolio_;
    Observation observation_;
    std::size_t cursor_ = 0;
    std::size_t start_ = 0;
    std::size_t steps_ = 0;
    bool done_ = true;
    EquityCurve equity_;
    std::vector<double> fractions_;
    std::vector<EpisodeTraceRow> rows_;
};

// timestamp,z,zone,action,target,reward,portfolio,action_reward,transaction,signed_gap,value
void write_episode_trace(std::ostream& out, std::span<const EpisodeTraceRow> rows);

// Line protocol:
//   {"cmd":"reset"}            -> {"obs":[P,z,zone_id]}
//   {"cmd":"step","action":x}  -> {"obs":[...],"reward":r,"done":b,"breakdown":[...]}
//   {"cmd":"close"}            -> ends the session
// Malformed lines get {"error":"ProtocolError",...} and the session continues.
void serve_external(TradingEnv& env, std::istream& in, std::ostream& out);

}  // namespace pairtrade
