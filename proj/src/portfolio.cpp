#include "pairtrade/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "pairtrade/errors.hpp"

namespace pairtrade {

void FeeModel::validate() const {
    if (!(rate >= 0.0 && rate <= 0.01)) throw Error(Errc::InvalidArgument, fmt::format("fee rate {} outside [0, 0.01]", rate));
}

Portfolio::Portfolio(double initial_cash, FeeModel fee, LegSizing sizing)
    : initial_cash_(initial_cash), fee_(fee), sizing_(sizing), cash_(initial_cash) {
    fee_.validate();
    if (!(initial_cash > 0.0)) throw Error(Errc::InvalidArgument, "initial cash must be positive");
}

double Portfolio::mark_to_market(double price_i, double price_j) const {
    return cash_ + qty_i_ * price_i + qty_j_ * price_j;
}

double Portfolio::position_fraction(double price_i, double price_j) const {
    if (!is_open()) return 0.0;
    const double value = mark_to_market(price_i, price_j);
    if (!(value > 0.0)) throw Error(Errc::BankruptPortfolio, fmt::format("portfolio value {} is not positive", value));
    const double gross = std::abs(qty_i_) * price_i + std::abs(qty_j_) * price_j;
    return (qty_i_ > 0.0 ? gross : -gross) / value;
}

double Portfolio::unrealized_pnl(double price_i, double price_j) const {
    return is_open() ? mark_to_market(price_i, price_j) - open_value_ : 0.0;
}

Portfolio::Fill Portfolio::charge(double notional_i, double notional_j) {
    Fill fill;
    fill.notional_i = notional_i;
    fill.notional_j = notional_j;
    fill.fees = fee_.rate * notional_i + fee_.rate * notional_j;
    cash_ -= fill.fees;
    trade_fees_ += fill.fees;
    return fill;
}

Portfolio::Fill Portfolio::open_gross(double gross, int direction, double price_i, double price_j, double hedge_ratio) {
    double notional_i = gross / 2.0;
    double notional_j = gross / 2.0;
    if (sizing_ == LegSizing::HedgeRatio) {
        const double h = std::abs(hedge_ratio);
        const double units = gross / (price_i + h * price_j);
        notional_i = units * price_i;
        notional_j = units * h * price_j;
    }
    const double d = static_cast<double>(direction);
    qty_i_ += d * notional_i / price_i;
    qty_j_ -= d * notional_j / price_j;
    cash_ += -d * notional_i + d * notional_j;
    return charge(notional_i, notional_j);
}

Portfolio::Fill Portfolio::scale_position(double factor, double price_i, double price_j) {
    const double sold_i = qty_i_ * (1.0 - factor);
    const double sold_j = qty_j_ * (1.0 - factor);
    qty_i_ *= factor;
    qty_j_ *= factor;
    cash_ += sold_i * price_i + sold_j * price_j;
    return charge(std::abs(sold_i) * price_i, std::abs(sold_j) * price_j);
}

Portfolio::Fill Portfolio::close_all(double price_i, double price_j) {
    const double notional_i = std::abs(qty_i_) * price_i;
    const double notional_j = std::abs(qty_j_) * price_j;
    cash_ += qty_i_ * price_i + qty_j_ * price_j;
    qty_i_ = 0.0;
    qty_j_ = 0.0;
    return charge(notional_i, notional_j);
}

ExecutionResult Portfolio::execute(double target, double price_i, double price_j, std::int64_t timestamp,
                                   double hedge_ratio) {
    if (!(price_i > 0.0 && price_j > 0.0)) throw Error(Errc::InvalidArgument, "prices must be positive");

    const double value = mark_to_market(price_i, price_j);
    if (!(value > 0.0)) throw Error(Errc::BankruptPortfolio, fmt::format("portfolio value {} is not positive", value));
    const double current = position_fraction(price_i, price_j);
    // Holding is always allowed: price drift can carry an open position past |P| = 1.
    if (target != current && !(std::abs(target) <= 1.0)) {
        throw Error(Errc::TargetOutOfRange, fmt::format("target {} outside [-1, 1]", target));
    }

    // Deltas are formed in notional space (target·V minus signed gross) so that
    // round fractions of a round value trade round notionals.
    const double gross = std::abs(qty_i_) * price_i + std::abs(qty_j_) * price_j;
    const double signed_gross = qty_i_ > 0.0 ? gross : -gross;
    ExecutionResult result;
    result.executed_delta = target == current ? 0.0 : (target * value - signed_gross) / value;
    const auto accumulate = [&](const Fill& f) {
        result.fees += f.fees;
        result.notional_i += f.notional_i;
        result.notional_j += f.notional_j;
    };
    const auto start_trade = [&](double start_value, int direction) {
        open_value_ = start_value;
        open_time_ = timestamp;
        direction_ = direction > 0 ? LegDirection::LongLeg : LegDirection::ShortLeg;
        max_fraction_ = 0.0;
        trade_fees_ = 0.0;
        adjustments_ = 0;
    };

    if (result.executed_delta != 0.0) {
        const int current_sign = current > 0.0 ? 1 : (current < 0.0 ? -1 : 0);
        const int target_sign = target > 0.0 ? 1 : (target < 0.0 ? -1 : 0);

        if (current_sign == 0) {
            start_trade(value, target_sign);
            accumulate(open_gross(std::abs(target) * value, target_sign, price_i, price_j, hedge_ratio));
        } else if (target_sign != current_sign) {
            accumulate(close_all(price_i, price_j));
            const double closed_value = mark_to_market(price_i, price_j);
            TradeRecord record;
            record.open_time = open_time_;
            record.close_time = timestamp;
            record.direction = direction_;
            record.max_fraction = max_fraction_;
            record.realized_pnl = closed_value - open_value_;
            record.fees_paid = trade_fees_;
            record.adjustments = adjustments_;
            trades_.push_back(record);
            result.closed = record;
            open_value_ = 0.0;
            if (target_sign != 0) {
                if (!(closed_value > 0.0)) {
                    throw Error(Errc::BankruptPortfolio, "portfolio value not positive after close");
                }
                start_trade(closed_value, target_sign);
                accumulate(open_gross(std::abs(target) * closed_value, target_sign, price_i, price_j, hedge_ratio));
            }
        } else if (std::abs(target) > std::abs(current)) {
            ++adjustments_;
            accumulate(open_gross(std::abs(target) * value - gross, target_sign, price_i, price_j, hedge_ratio));
        } else {
            ++adjustments_;
            accumulate(scale_position(std::abs(target) / std::abs(current), price_i, price_j));
        }
        if (is_open()) {
            max_fraction_ = std::max(max_fraction_, std::abs(position_fraction(price_i, price_j)));
        }
    }

    traded_notional_i_ += result.notional_i;
    traded_notional_j_ += result.notional_j;
    action_log_.push_back(
        {timestamp, target, result.executed_delta, result.fees, result.notional_i, result.notional_j});
    return result;
}

void write_trade_blotter(std::ostream& out, std::span<const TradeRecord> trades) {
    out << "open_time,close_time,direction,max_fraction,realized_pnl,fees_paid,adjustments\n";
    for (const auto& t : trades) {
        out << fmt::format("{},{},{},{},{},{},{}\n", t.open_time, t.close_time,
                           t.direction == LegDirection::LongLeg ? "LongLeg" : "ShortLeg", t.max_fraction,
                           t.realized_pnl, t.fees_paid, t.adjustments);
    }
}

void write_action_log(std::ostream& out, std::span<const ActionLogEntry> log) {
    out << "timestamp,target,delta,fees,notional_i,notional_j\n";
    for (const auto& a : log) {
        out << fmt::format("{},{},{},{},{},{}\n", a.timestamp, a.target, a.executed_delta, a.fees, a.notional_i,
                           a.notional_j);
    }
}

}  // namespace pairtrade
