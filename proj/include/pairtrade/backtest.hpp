// backtest.hpp
// Replays a policy over a precomputed spread trace against a fresh portfolio.

#pragma once

#include <cstdint>
#include <vector>

#include "pairtrade/market_data.hpp"
#include "pairtrade/metrics.hpp"
#include "pairtrade/policies.hpp"
#include "pairtrade/portfolio.hpp"
#include "pairtrade/spread_engine.hpp"

namespace pairtrade {

struct BacktestConfig {
    FeeModel fee{};
    double initial_cash = 10000.0;
    LegSizing sizing = LegSizing::EqualNotional;
};

struct BacktestResult {
    EquityCurve equity;                    // initial cash, then V after each decision
    std::vector<double> position_fractions;  // P after each decision
    std::vector<std::int64_t> decision_times;  // open_time of each decision bar
    std::vector<double> targets;
    std::vector<TradeRecord> trades;
    std::vector<ActionLogEntry> actions;
    double total_fees = 0.0;
    double traded_notional_i = 0.0;
    double traded_notional_j = 0.0;
    bool bankrupt = false;

    std::size_t steps() const noexcept { return position_fractions.size(); }
    double final_value() const noexcept { return equity.values.empty() ? 0.0 : equity.values.back(); }
};

double intervals_per_year(Interval interval) noexcept;

// One decision per ready observation at the bar's close price. Zones are
// re-derived from z with `thresholds`, so one trace serves every (OT, CT).
// Stops early (bankrupt = true) if the portfolio value reaches zero.
BacktestResult run_backtest(const AlignedPairSeries& series, const SpreadTrace& trace, const Thresholds& thresholds,
                            Policy& policy, const BacktestConfig& config);

}  // namespace pairtrade
