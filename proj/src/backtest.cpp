#include "pairtrade/backtest.hpp"

#include "pairtrade/errors.hpp"

namespace pairtrade {

double intervals_per_year(Interval interval) noexcept {
    return 365.0 * 24.0 * 60.0 / static_cast<double>(interval_minutes(interval));
}

BacktestResult run_backtest(const AlignedPairSeries& series, const SpreadTrace& trace, const Thresholds& thresholds,
                            Policy& policy, const BacktestConfig& config) {
    thresholds.validate();
    if (trace.observations.size() != series.size()) {
        throw Error(Errc::LengthMismatch, "spread trace does not cover the series");
    }
    const auto first = trace.first_ready();
    if (first >= series.size()) throw Error(Errc::SeriesTooShort, "series shorter than the spread window");

    Portfolio portfolio(config.initial_cash, config.fee, config.sizing);
    BacktestResult result;
    result.equity.intervals_per_year = intervals_per_year(series.interval);
    result.equity.timestamps.push_back(series.timestamps[first]);
    result.equity.values.push_back(config.initial_cash);
    const auto step_ms = interval_ms(series.interval);

    for (std::size_t t = first; t < series.size(); ++t) {
        const auto& obs = trace.observations[t];
        if (!obs) continue;
        const double pi = series.prices_i[t];
        const double pj = series.prices_j[t];
        Observation o;
        o.position = portfolio.position_fraction(pi, pj);
        o.z = obs->z;
        o.zone = classify_zone(obs->z, thresholds);
        const double target = policy.decide(o).target;
        portfolio.execute(target, pi, pj, series.timestamps[t]);

        const double value = portfolio.mark_to_market(pi, pj);
        result.decision_times.push_back(series.timestamps[t]);
        result.targets.push_back(target);
        result.equity.timestamps.push_back(series.timestamps[t] + step_ms);
        result.equity.values.push_back(value);
        if (!(value > 0.0)) {
            result.position_fractions.push_back(0.0);
            result.bankrupt = true;
            break;
        }
        result.position_fractions.push_back(portfolio.position_fraction(pi, pj));
    }

    result.trades = portfolio.trades();
    result.actions = portfolio.action_log();
    result.total_fees = portfolio.total_fees();
    result.traded_notional_i = portfolio.traded_notional_i();
    result.traded_notional_j = portfolio.traded_notional_j();
    return result;
}

}  // namespace pairtrade
