#include "pairtrade/spread_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "pairtrade/econometrics.hpp"
#include "pairtrade/errors.hpp"

namespace pairtrade {

void Thresholds::validate() const {
    if (!(close > 0.0 && open > close && std::isfinite(open))) {
        throw Error(Errc::InvalidArgument, fmt::format("thresholds need OT > CT > 0 (OT={}, CT={})", open, close));
    }
}

std::string_view to_string(Zone zone) noexcept {
    switch (zone) {
        case Zone::ShortZone: return "ShortZone";
        case Zone::NeutralShortZone: return "NeutralShortZone";
        case Zone::CloseZone: return "CloseZone";
        case Zone::NeutralLongZone: return "NeutralLongZone";
        case Zone::LongZone: return "LongZone";
    }
    return "CloseZone";
}

Zone mirror(Zone zone) noexcept {
    return static_cast<Zone>(kZoneCount - 1 - static_cast<int>(zone));
}

SpreadModel fit_spread(std::span<const double> window_prices_i, std::span<const double> window_prices_j) {
    if (window_prices_i.size() != window_prices_j.size()) {
        throw Error(Errc::LengthMismatch, "fit_spread: window lengths differ");
    }
    if (!window_prices_j.empty() &&
        std::all_of(window_prices_j.begin(), window_prices_j.end(),
                    [&](double v) { return v == window_prices_j.front(); })) {
        throw Error(Errc::SingularDesign, "fit_spread: p_j constant over the window");
    }
    if (window_prices_i.size() < kMinSpreadWindow) {
        throw Error(Errc::WindowTooShort, fmt::format("fit_spread: window {} below minimum {}",
                                                      window_prices_i.size(), kMinSpreadWindow));
    }
    const OlsFit fit = ols(window_prices_i, window_prices_j);
    SpreadModel model;
    model.beta0 = fit.alpha;
    model.beta1 = fit.beta;
    model.window = window_prices_i.size();
    const double n = static_cast<double>(model.window);
    double mean = 0.0;
    for (double r : fit.residuals) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : fit.residuals) var += (r - mean) * (r - mean);
    model.spread_mean = mean;
    model.spread_std = std::sqrt(var / n);
    model.latest_spread = fit.residuals.back();
    return model;
}

double zscore(const SpreadModel& model, double spread) {
    if (!(model.spread_std > 1e-12)) throw Error(Errc::DegenerateSpread, "spread standard deviation is zero");
    return (spread - model.spread_mean) / model.spread_std;
}

Zone classify_zone(double z, const Thresholds& t) {
    if (z >= t.open) return Zone::ShortZone;
    if (z >= t.close) return Zone::NeutralShortZone;
    if (z > -t.close) return Zone::CloseZone;
    if (z > -t.open) return Zone::NeutralLongZone;
    return Zone::LongZone;
}

SpreadEngine::SpreadEngine(std::size_t window, Thresholds thresholds, FitMode mode)
    : window_(window), thresholds_(thresholds), mode_(mode) {
    thresholds_.validate();
    if (window_ < kMinSpreadWindow) {
        throw Error(Errc::WindowTooShort, fmt::format("spread window {} below minimum {}", window_, kMinSpreadWindow));
    }
}

void SpreadEngine::rebuild_sums() {
    anchor_i_ = samples_i_.front();
    anchor_j_ = samples_j_.front();
    sum_x_ = sum_y_ = sum_xx_ = sum_xy_ = sum_yy_ = 0.0;
    for (std::size_t k = 0; k < samples_i_.size(); ++k) {
        const double x = samples_j_[k] - anchor_j_;
        const double y = samples_i_[k] - anchor_i_;
        sum_x_ += x;
        sum_y_ += y;
        sum_xx_ += x * x;
        sum_xy_ += x * y;
        sum_yy_ += y * y;
    }
    steps_since_rebuild_ = 0;
}

SpreadModel SpreadEngine::incremental_model() const {
    const double n = static_cast<double>(window_);
    const double mx = sum_x_ / n;
    const double my = sum_y_ / n;
    const double sxx = sum_xx_ - sum_x_ * mx;
    const double sxy = sum_xy_ - sum_x_ * my;
    const double syy = sum_yy_ - sum_y_ * my;
    if (!(sxx > 1e-9 * std::max(sum_xx_, 1e-300))) {
        // Near-constant regressor: let the exact path decide.
        const std::vector<double> wi(samples_i_.begin(), samples_i_.end());
        const std::vector<double> wj(samples_j_.begin(), samples_j_.end());
        return fit_spread(wi, wj);
    }
    SpreadModel model;
    model.window = window_;
    model.beta1 = sxy / sxx;
    model.beta0 = (my - model.beta1 * mx) + anchor_i_ - model.beta1 * anchor_j_;
    model.spread_mean = 0.0;
    model.spread_std = std::sqrt(std::max(0.0, syy - model.beta1 * sxy) / n);
    const double x_last = samples_j_.back() - anchor_j_;
    const double y_last = samples_i_.back() - anchor_i_;
    model.latest_spread = (y_last - my) - model.beta1 * (x_last - mx);
    return model;
}

std::optional<SpreadObservation> SpreadEngine::push(std::int64_t timestamp, double price_i, double price_j) {
    samples_i_.push_back(price_i);
    samples_j_.push_back(price_j);
    bool evicted = false;
    double old_i = 0.0, old_j = 0.0;
    if (samples_i_.size() > window_) {
        old_i = samples_i_.front();
        old_j = samples_j_.front();
        samples_i_.pop_front();
        samples_j_.pop_front();
        evicted = true;
    }
    if (!warm()) return std::nullopt;

    if (mode_ == FitMode::Refit) {
        const std::vector<double> wi(samples_i_.begin(), samples_i_.end());
        const std::vector<double> wj(samples_j_.begin(), samples_j_.end());
        model_ = fit_spread(wi, wj);
    } else {
        if (!evicted || steps_since_rebuild_ >= window_) {
            rebuild_sums();
        } else {
            const double xo = old_j - anchor_j_, yo = old_i - anchor_i_;
            const double xn = price_j - anchor_j_, yn = price_i - anchor_i_;
            sum_x_ += xn - xo;
            sum_y_ += yn - yo;
            sum_xx_ += xn * xn - xo * xo;
            sum_xy_ += xn * yn - xo * yo;
            sum_yy_ += yn * yn - yo * yo;
            ++steps_since_rebuild_;
        }
        model_ = incremental_model();
    }
    SpreadObservation obs;
    obs.timestamp = timestamp;
    obs.spread = model_->latest_spread;
    obs.z = zscore(*model_, model_->latest_spread);
    obs.zone = classify_zone(obs.z, thresholds_);
    return obs;
}

SpreadObservation SpreadEngine::advance(std::int64_t timestamp, double price_i, double price_j) {
    auto obs = push(timestamp, price_i, price_j);
    if (!obs) throw Error(Errc::NotWarm, fmt::format("{} of {} warm-up samples seen", samples_i_.size(), window_));
    return *obs;
}

SpreadTrace compute_spread_trace(const AlignedPairSeries& series, std::size_t window, const Thresholds& thresholds,
                                 FitMode mode) {
    SpreadEngine engine(window, thresholds, mode);
    SpreadTrace trace;
    trace.window = window;
    trace.observations.reserve(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        trace.observations.push_back(engine.push(series.timestamps[t], series.prices_i[t], series.prices_j[t]));
    }
    return trace;
}

void write_spread_trace(std::ostream& out, const SpreadTrace& trace) {
    out << "timestamp,spread,z,zone\n";
    for (const auto& obs : trace.observations) {
        if (!obs) continue;
        out << fmt::format("{},{},{},{}\n", obs->timestamp, obs->spread, obs->z, to_string(obs->zone));
    }
}

}  // namespace pairtrade
