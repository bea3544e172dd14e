// portfolio.hpp
// Two-leg pair portfolio: cash, signed leg quantities, fees, open/adjust/close
// semantics and realized trade bookkeeping.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace pairtrade {

struct FeeModel {
    double rate = 0.0002;  // fraction of traded notional, charged per asset

    void validate() const;
};

enum class LegDirection { LongLeg, ShortLeg };

// How a traded gross notional is split across the two assets.
enum class LegSizing {
    EqualNotional,  // half on each asset
    HedgeRatio,     // qty_j = hedge_ratio * qty_i
};

struct TradeRecord {
    std::int64_t open_time = 0;
    std::int64_t close_time = 0;
    LegDirection direction = LegDirection::LongLeg;
    double max_fraction = 0.0;
    double realized_pnl = 0.0;  // V at close (after fees) minus V before opening
    double fees_paid = 0.0;
    std::size_t adjustments = 0;
};

struct ActionLogEntry {
    std::int64_t timestamp = 0;
    double target = 0.0;
    double executed_delta = 0.0;
    double fees = 0.0;
    double notional_i = 0.0;
    double notional_j = 0.0;
};

struct ExecutionResult {
    double executed_delta = 0.0;
    double fees = 0.0;
    double notional_i = 0.0;
    double notional_j = 0.0;
    std::optional<TradeRecord> closed;

    bool traded() const noexcept { return notional_i != 0.0 || notional_j != 0.0; }
};

class Portfolio {
public:
    explicit Portfolio(double initial_cash, FeeModel fee = {}, LegSizing sizing = LegSizing::EqualNotional);

    double mark_to_market(double price_i, double price_j) const;
    // Signed gross exposure over portfolio value: +q for a long leg, -q for a short leg.
    double position_fraction(double price_i, double price_j) const;
    // V - V'_p for an open position, 0 when flat.
    double unrealized_pnl(double price_i, double price_j) const;

    // Trade from the current position fraction to `target`. Only the difference
    // is traded; crossing zero closes the open trade first, then opens the rest.
    ExecutionResult execute(double target, double price_i, double price_j, std::int64_t timestamp,
                            double hedge_ratio = 1.0);

    double initial_cash() const noexcept { return initial_cash_; }
    double cash() const noexcept { return cash_; }
    double qty_i() const noexcept { return qty_i_; }
    double qty_j() const noexcept { return qty_j_; }
    double open_value() const noexcept { return open_value_; }
    const FeeModel& fee() const noexcept { return fee_; }
    bool is_open() const noexcept { return qty_i_ != 0.0 || qty_j_ != 0.0; }
    // Fee rate times the cumulative traded notional of each asset.
    double total_fees() const noexcept { return fee_.rate * traded_notional_i_ + fee_.rate * traded_notional_j_; }
    double traded_notional_i() const noexcept { return traded_notional_i_; }
    double traded_notional_j() const noexcept { return traded_notional_j_; }
    const std::vector<TradeRecord>& trades() const noexcept { return trades_; }
    const std::vector<ActionLogEntry>& action_log() const noexcept { return action_log_; }

private:
    struct Fill {
        double fees = 0.0;
        double notional_i = 0.0;
        double notional_j = 0.0;
    };
    Fill open_gross(double gross, int direction, double price_i, double price_j, double hedge_ratio);
    Fill scale_position(double factor, double price_i, double price_j);
    Fill close_all(double price_i, double price_j);
    Fill charge(double notional_i, double notional_j);

    double initial_cash_;
    FeeModel fee_;
    LegSizing sizing_;
    double cash_;
    double qty_i_ = 0.0;
    double qty_j_ = 0.0;
    double open_value_ = 0.0;

    // Open-trade bookkeeping.
    std::int64_t open_time_ = 0;
    LegDirection direction_ = LegDirection::LongLeg;
    double max_fraction_ = 0.0;
    double trade_fees_ = 0.0;
    std::size_t adjustments_ = 0;

    double traded_notional_i_ = 0.0;
    double traded_notional_j_ = 0.0;
    std::vector<TradeRecord> trades_;
    std::vector<ActionLogEntry> action_log_;
};

inline double mark_to_market(const Portfolio& p, double price_i, double price_j) {
    return p.mark_to_market(price_i, price_j);
}
inline double position_fraction(const Portfolio& p, double price_i, double price_j) {
    return p.position_fraction(price_i, price_j);
}

// open_time,close_time,direction,max_fraction,realized_pnl,fees_paid,adjustments
void write_trade_blotter(std::ostream& out, std::span<const TradeRecord> trades);
// timestamp,target,delta,fees,notional_i,notional_j
void write_action_log(std::ostream& out, std::span<const ActionLogEntry> log);

}  // namespace pairtrade
