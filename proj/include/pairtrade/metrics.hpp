// metrics.hpp
// Profitability, activity and risk indicators computed from an equity curve and
// a trade blotter.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairtrade/portfolio.hpp"

namespace pairtrade {

constexpr double kMsPerYear = 365.25 * 86400.0 * 1000.0;

struct EquityCurve {
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    double intervals_per_year = 525600.0;
};

struct MetricsConfig {
    double risk_free_rate = 0.055;  // annual
};

struct TradeStats {
    std::size_t total = 0;
    std::size_t won = 0;
    std::size_t lost = 0;
    double win_loss_ratio = 0.0;  // +inf when lost == 0 and won > 0
    double max_win = 0.0;
    double max_loss = 0.0;
    double avg_win = 0.0;
    double avg_loss = 0.0;
};

struct ReturnMoments {
    double volatility_ann = 0.0;  // percent
    double skew = 0.0;
    double kurtosis = 0.0;  // raw; a normal sample gives 3
};

struct MetricsReport {
    double cumulative_return = 0.0;  // percent
    double cagr = 0.0;               // percent
    std::optional<double> sharpe;    // empty when the excess returns have zero spread
    TradeStats trades;
    double time_in_market = 0.0;  // percent
    ReturnMoments risk;
    double mean_return = 0.0;    // R_p, per interval
    double excess_std = 0.0;     // sigma_p, per interval
    double final_value = 0.0;
    std::size_t steps = 0;
};

std::vector<double> simple_returns(const EquityCurve& curve);
double cumulative_return(const EquityCurve& curve);
double cagr(const EquityCurve& curve);
double per_interval_risk_free(double annual_rate, double intervals_per_year);
double sharpe_from_returns(std::span<const double> returns, double intervals_per_year, const MetricsConfig& cfg);
double sharpe(const EquityCurve& curve, const MetricsConfig& cfg);
TradeStats trade_stats(std::span<const TradeRecord> blotter);
double time_in_market(std::span<const double> position_fractions);
ReturnMoments return_moments(std::span<const double> returns, double intervals_per_year);
std::vector<double> drawdown_series(const EquityCurve& curve);

MetricsReport compute_report(const EquityCurve& curve, std::span<const TradeRecord> blotter,
                             std::span<const double> position_fractions, const MetricsConfig& cfg);

nlohmann::ordered_json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::ordered_json& j);
// Three indicator groups (profitability, activity, risk) as an aligned text table.
std::string format_report_table(const MetricsReport& report, const std::string& title = "");
// timestamp,value,drawdown
void write_equity_csv(std::ostream& out, const EquityCurve& curve);

}  // namespace pairtrade
