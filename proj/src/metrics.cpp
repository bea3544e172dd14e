#include "pairtrade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "pairtrade/errors.hpp"

namespace pairtrade {

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Spread below this (relative to the mean magnitude) is float noise on a constant series.
bool negligible_spread(double stddev, double mean) { return stddev <= 1e-12 * std::max(1e-12, std::abs(mean)) || stddev < 1e-15; }

nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return nullptr;
}

double number_from(const nlohmann::ordered_json& j) {
    if (j.is_null()) return std::nan("");
    if (j.is_string()) return j.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                              : -std::numeric_limits<double>::infinity();
    return j.get<double>();
}

}  // namespace

std::vector<double> simple_returns(const EquityCurve& curve) {
    std::vector<double> out;
    if (curve.values.size() < 2) return out;
    out.reserve(curve.values.size() - 1);
    for (std::size_t t = 1; t < curve.values.size(); ++t) out.push_back(curve.values[t] / curve.values[t - 1] - 1.0);
    return out;
}

double cumulative_return(const EquityCurve& curve) {
    if (curve.values.empty() || !(curve.values.front() > 0.0)) {
        throw Error(Errc::DegenerateSpan, "cumulative return needs a positive starting value");
    }
    return (curve.values.back() / curve.values.front() - 1.0) * 100.0;
}

double cagr(const EquityCurve& curve) {
    if (curve.values.size() < 2 || curve.timestamps.size() != curve.values.size()) {
        throw Error(Errc::DegenerateSpan, "CAGR needs at least two curve points");
    }
    const double v0 = curve.values.front();
    const double vn = curve.values.back();
    const auto span_ms = curve.timestamps.back() - curve.timestamps.front();
    if (!(v0 > 0.0) || !(vn > 0.0) || span_ms <= 0) {
        throw Error(Errc::DegenerateSpan, "CAGR needs positive endpoints and t_n > t_0");
    }
    const double years = static_cast<double>(span_ms) / kMsPerYear;
    return (std::pow(vn / v0, 1.0 / years) - 1.0) * 100.0;
}

double per_interval_risk_free(double annual_rate, double intervals_per_year) {
    return std::pow(1.0 + annual_rate, 1.0 / intervals_per_year) - 1.0;
}

double sharpe_from_returns(std::span<const double> returns, double intervals_per_year, const MetricsConfig& cfg) {
    if (returns.size() < 2) throw Error(Errc::InsufficientData, "sharpe needs at least two returns");
    const double rf = per_interval_risk_free(cfg.risk_free_rate, intervals_per_year);
    std::vector<double> excess(returns.begin(), returns.end());
    bool exactly_rf = true;
    for (double& r : excess) {
        exactly_rf = exactly_rf && r == rf;
        r -= rf;
    }
    if (exactly_rf) return 0.0;
    const double mean = mean_of(excess);
    const double sd = sample_std(excess, mean);
    if (negligible_spread(sd, mean)) {
        if (std::abs(mean) <= 1e-15) return 0.0;
        throw Error(Errc::ZeroVolatility, "excess returns have zero standard deviation");
    }
    return mean / sd * std::sqrt(intervals_per_year);
}

double sharpe(const EquityCurve& curve, const MetricsConfig& cfg) {
    const auto r = simple_returns(curve);
    return sharpe_from_returns(r, curve.intervals_per_year, cfg);
}

TradeStats trade_stats(std::span<const TradeRecord> blotter) {
    TradeStats s;
    s.total = blotter.size();
    double win_sum = 0.0, loss_sum = 0.0;
    for (const auto& t : blotter) {
        if (t.realized_pnl > 0.0) {
            ++s.won;
            win_sum += t.realized_pnl;
            s.max_win = std::max(s.max_win, t.realized_pnl);
        } else if (t.realized_pnl < 0.0) {
            ++s.lost;
            loss_sum += t.realized_pnl;
            s.max_loss = std::min(s.max_loss, t.realized_pnl);
        }
    }
    if (s.won > 0) s.avg_win = win_sum / static_cast<double>(s.won);
    if (s.lost > 0) s.avg_loss = loss_sum / static_cast<double>(s.lost);
    if (s.lost > 0) {
        s.win_loss_ratio = static_cast<double>(s.won) / static_cast<double>(s.lost);
    } else {
        s.win_loss_ratio = s.won > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return s;
}

double time_in_market(std::span<const double> position_fractions) {
    if (position_fractions.empty()) return 0.0;
    const auto invested = std::count_if(position_fractions.begin(), position_fractions.end(),
                                        [](double p) { return std::abs(p) > 1e-9; });
    return 100.0 * static_cast<double>(invested) / static_cast<double>(position_fractions.size());
}

ReturnMoments return_moments(std::span<const double> returns, double intervals_per_year) {
    ReturnMoments m;
    if (returns.empty()) return m;
    const double mean = mean_of(returns);
    m.volatility_ann = sample_std(returns, mean) * std::sqrt(intervals_per_year) * 100.0;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double r : returns) {
        const double d = r - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(returns.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        m.skew = m3 / std::pow(m2, 1.5);
        m.kurtosis = m4 / (m2 * m2);
    }
    return m;
}

std::vector<double> drawdown_series(const EquityCurve& curve) {
    std::vector<double> dd;
    dd.reserve(curve.values.size());
    double peak = 0.0;
    for (double v : curve.values) {
        peak = std::max(peak, v);
        dd.push_back(peak > 0.0 ? v / peak - 1.0 : 0.0);
    }
    return dd;
}

MetricsReport compute_report(const EquityCurve& curve, std::span<const TradeRecord> blotter,
                             std::span<const double> position_fractions, const MetricsConfig& cfg) {
    MetricsReport r;
    r.steps = position_fractions.size();
    r.final_value = curve.values.empty() ? 0.0 : curve.values.back();
    r.cumulative_return = cumulative_return(curve);
    try {
        r.cagr = cagr(curve);
    } catch (const Error&) {
        r.cagr = 0.0;
    }
    const auto returns = simple_returns(curve);
    r.mean_return = mean_of(returns);
    const double rf = per_interval_risk_free(cfg.risk_free_rate, curve.intervals_per_year);
    std::vector<double> excess(returns);
    for (double& x : excess) x -= rf;
    r.excess_std = sample_std(excess, mean_of(excess));
    try {
        r.sharpe = sharpe_from_returns(returns, curve.intervals_per_year, cfg);
    } catch (const Error&) {
        r.sharpe.reset();
    }
    r.trades = trade_stats(blotter);
    r.time_in_market = time_in_market(position_fractions);
    r.risk = return_moments(returns, curve.intervals_per_year);
    return r;
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["profitability"] = {
        {"cumulative_return_pct", r.cumulative_return},
        {"cagr_pct", number_or_null(r.cagr)},
        {"sharpe", r.sharpe ? number_or_null(*r.sharpe) : nlohmann::ordered_json(nullptr)},
        {"mean_return", r.mean_return},
        {"excess_std", r.excess_std},
        {"final_value", r.final_value},
    };
    j["activity"] = {
        {"total_actions", r.trades.total},
        {"won_actions", r.trades.won},
        {"lost_actions", r.trades.lost},
        {"win_loss_ratio", number_or_null(r.trades.win_loss_ratio)},
        {"max_win", r.trades.max_win},
        {"max_loss", r.trades.max_loss},
        {"avg_win", r.trades.avg_win},
        {"avg_loss", r.trades.avg_loss},
        {"time_in_market_pct", r.time_in_market},
        {"steps", r.steps},
    };
    j["risk"] = {
        {"volatility_ann_pct", r.risk.volatility_ann},
        {"skew", r.risk.skew},
        {"kurtosis", r.risk.kurtosis},
    };
    return j;
}

MetricsReport report_from_json(const nlohmann::ordered_json& j) {
    MetricsReport r;
    const auto& p = j.at("profitability");
    r.cumulative_return = p.at("cumulative_return_pct").get<double>();
    r.cagr = number_from(p.at("cagr_pct"));
    if (!p.at("sharpe").is_null()) r.sharpe = number_from(p.at("sharpe"));
    r.mean_return = p.at("mean_return").get<double>();
    r.excess_std = p.at("excess_std").get<double>();
    r.final_value = p.at("final_value").get<double>();
    const auto& a = j.at("activity");
    r.trades.total = a.at("total_actions").get<std::size_t>();
    r.trades.won = a.at("won_actions").get<std::size_t>();
    r.trades.lost = a.at("lost_actions").get<std::size_t>();
    r.trades.win_loss_ratio = number_from(a.at("win_loss_ratio"));
    r.trades.max_win = a.at("max_win").get<double>();
    r.trades.max_loss = a.at("max_loss").get<double>();
    r.trades.avg_win = a.at("avg_win").get<double>();
    r.trades.avg_loss = a.at("avg_loss").get<double>();
    r.time_in_market = a.at("time_in_market_pct").get<double>();
    r.steps = a.at("steps").get<std::size_t>();
    const auto& k = j.at("risk");
    r.risk.volatility_ann = k.at("volatility_ann_pct").get<double>();
    r.risk.skew = k.at("skew").get<double>();
    r.risk.kurtosis = k.at("kurtosis").get<double>();
    return r;
}

std::string format_report_table(const MetricsReport& r, const std::string& title) {
    std::string out;
    if (!title.empty()) out += title + "\n";
    const auto row = [&](std::string_view label, const std::string& value) {
        out += fmt::format("  {:<34}{:>16}\n", label, value);
    };
    const auto pct = [](double v) { return fmt::format("{:.2f}%", v); };
    const auto num = [](double v) { return fmt::format("{:.2f}", v); };
    out += "Profitability\n";
    row("Cumulative Return", pct(r.cumulative_return));
    row("CAGR", pct(r.cagr));
    row("Sharpe Ratio", r.sharpe ? num(*r.sharpe) : "n/a");
    out += "Activities\n";
    row("Total Action Count", std::to_string(r.trades.total));
    row("Won Action Count", std::to_string(r.trades.won));
    row("Lost Action Count", std::to_string(r.trades.lost));
    row("Win/Loss Action Ratio", std::isinf(r.trades.win_loss_ratio) ? "inf" : num(r.trades.win_loss_ratio));
    row("Max Win Action", num(r.trades.max_win));
    row("Max Loss Action", num(r.trades.max_loss));
    row("Avg Win Action Profit/Loss", num(r.trades.avg_win));
    row("Avg Loss Action Profit/Loss", num(r.trades.avg_loss));
    row("Time in Market", pct(r.time_in_market));
    out += "Risk\n";
    row("Volatility (ann.)", pct(r.risk.volatility_ann));
    row("Skew", num(r.risk.skew));
    row("Kurtosis", num(r.risk.kurtosis));
    return out;
}

void write_equity_csv(std::ostream& out, const EquityCurve& curve) {
    const auto dd = drawdown_series(curve);
    out << "timestamp,value,drawdown\n";
    for (std::size_t t = 0; t < curve.values.size(); ++t) {
        out << fmt::format("{},{},{}\n", curve.timestamps[t], curve.values[t], dd[t]);
    }
}

}  // namespace pairtrade
