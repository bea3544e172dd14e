// spread_engine.hpp
// Rolling-window spread regression, z-score normalisation and zone classification.

#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pairtrade/market_data.hpp"

namespace pairtrade {

struct Thresholds {
    double open = 1.8;   // OT, z-score units
    double close = 0.4;  // CT

    // Throws Error(InvalidArgument) unless OT > CT > 0.
    void validate() const;
};

// Ordered as in the zone partition, from the top.
enum class Zone { ShortZone = 0, NeutralShortZone = 1, CloseZone = 2, NeutralLongZone = 3, LongZone = 4 };

constexpr int kZoneCount = 5;
std::string_view to_string(Zone zone) noexcept;
Zone mirror(Zone zone) noexcept;
constexpr bool is_neutral(Zone zone) noexcept {
    return zone == Zone::NeutralShortZone || zone == Zone::NeutralLongZone;
}

struct SpreadModel {
    double beta0 = 0.0;
    double beta1 = 0.0;
    std::size_t window = 0;
    double spread_mean = 0.0;
    double spread_std = 0.0;  // population
    double latest_spread = 0.0;
};

struct SpreadObservation {
    double z = 0.0;
    Zone zone = Zone::CloseZone;
    std::int64_t timestamp = 0;
    double spread = 0.0;
};

constexpr std::size_t kMinSpreadWindow = 30;

// OLS of p_i on p_j over the window.
SpreadModel fit_spread(std::span<const double> window_prices_i, std::span<const double> window_prices_j);

double zscore(const SpreadModel& model, double spread);

// z >= OT: Short; CT <= z < OT: NeutralShort; -CT < z < CT: Close;
// -OT < z <= -CT: NeutralLong; z <= -OT: Long.
Zone classify_zone(double z, const Thresholds& thresholds);

enum class FitMode {
    Refit,        // full OLS over the window every step
    Incremental,  // rolling sums; periodically re-anchored
};

class SpreadEngine {
public:
    SpreadEngine(std::size_t window, Thresholds thresholds, FitMode mode = FitMode::Refit);

    // Returns nullopt while fewer than `window` samples have been seen.
    std::optional<SpreadObservation> push(std::int64_t timestamp, double price_i, double price_j);
    // Same as push but throws Error(NotWarm) during warm-up.
    SpreadObservation advance(std::int64_t timestamp, double price_i, double price_j);

    bool warm() const noexcept { return samples_i_.size() == window_; }
    std::size_t window() const noexcept { return window_; }
    const Thresholds& thresholds() const noexcept { return thresholds_; }
    const std::optional<SpreadModel>& latest_model() const noexcept { return model_; }

private:
    SpreadModel incremental_model() const;
    void rebuild_sums();

    std::size_t window_;
    Thresholds thresholds_;
    FitMode mode_;
    std::deque<double> samples_i_;
    std::deque<double> samples_j_;
    std::optional<SpreadModel> model_;

    // Incremental state: sums of values shifted by an anchor.
    double anchor_i_ = 0.0;
    double anchor_j_ = 0.0;
    double sum_x_ = 0.0, sum_y_ = 0.0, sum_xx_ = 0.0, sum_xy_ = 0.0, sum_yy_ = 0.0;
    std::size_t steps_since_rebuild_ = 0;
};

// z for every index of the series; nullopt for warm-up indices.
struct SpreadTrace {
    std::size_t window = 0;
    std::vector<std::optional<SpreadObservation>> observations;

    std::size_t first_ready() const noexcept { return window == 0 ? 0 : window - 1; }
};

SpreadTrace compute_spread_trace(const AlignedPairSeries& series, std::size_t window, const Thresholds& thresholds,
                                 FitMode mode = FitMode::Incremental);

// timestamp,spread,z,zone
void write_spread_trace(std::ostream& out, const SpreadTrace& trace);

}  // namespace pairtrade
