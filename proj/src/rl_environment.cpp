#include "pairtrade/rl_environment.hpp"

#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>

#include "pairtrade/errors.hpp"

namespace pairtrade {

std::string_view to_string(EnvMode mode) noexcept { return mode == EnvMode::RL1 ? "rl1" : "rl2"; }

std::string_view to_string(RewardVariant variant) noexcept {
    return variant == RewardVariant::Shaped ? "shaped" : "plain";
}

EnvMode parse_env_mode(std::string_view text) {
    if (text == "rl1" || text == "RL1") return EnvMode::RL1;
    if (text == "rl2" || text == "RL2") return EnvMode::RL2;
    throw Error(Errc::ConfigError, fmt::format("unknown env mode '{}' (expected rl1 or rl2)", text));
}

RewardVariant parse_reward_variant(std::string_view text) {
    if (text == "shaped") return RewardVariant::Shaped;
    if (text == "plain") return RewardVariant::Plain;
    throw Error(Errc::ConfigError, fmt::format("unknown reward variant '{}' (expected shaped or plain)", text));
}

std::string_view to_string(DiscreteAction action) noexcept {
    switch (action) {
        case DiscreteAction::OpenLongLeg: return "OpenLongLeg";
        case DiscreteAction::Close: return "Close";
        case DiscreteAction::OpenShortLeg: return "OpenShortLeg";
    }
    return "Close";
}

void RewardWeights::validate() const {
    for (double w : {portfolio, action, transaction}) {
        if (!std::isfinite(w) || w < 0.0) throw Error(Errc::InvalidArgument, "reward weights must be finite and >= 0");
    }
}

void EnvConfig::validate() const {
    thresholds.validate();
    fee.validate();
    weights.validate();
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(Errc::InvalidArgument, "gamma must lie in [0, 1)");
    if (!(initial_cash > 0.0)) throw Error(Errc::InvalidArgument, "initial cash must be positive");
    if (window < kMinSpreadWindow) throw Error(Errc::WindowTooShort, fmt::format("window {} below {}", window, kMinSpreadWindow));
    if (!(flat_band >= 0.0 && flat_band < 1.0)) throw Error(Errc::InvalidArgument, "flat band must lie in [0, 1)");
}

double plain_reward_rl1(double delta_pnl, double fees, bool traded) { return traded ? delta_pnl - fees : 0.0; }

double plain_reward_rl2(double delta_pnl, double action, double fees) { return delta_pnl * action - fees; }

double shaped_reward(const RewardBreakdown& b, const RewardWeights& w) {
    return w.portfolio * b.portfolio + w.action * b.action - w.transaction * b.transaction;
}

std::optional<int> rewarded_direction(Zone zone) {
    switch (zone) {
        case Zone::ShortZone: return -1;
        case Zone::LongZone: return 1;
        case Zone::CloseZone: return 0;
        case Zone::NeutralShortZone:
        case Zone::NeutralLongZone: break;
    }
    return std::nullopt;
}

double action_score(Zone zone, int action_direction) {
    const auto wanted = rewarded_direction(zone);
    if (!wanted) return 0.0;
    return *wanted == action_direction ? 1.0 : -1.0;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double g = 0.0;
    for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) g = *it + gamma * g;
    return g;
}

namespace {

std::shared_ptr<const SpreadTrace> build_trace(const std::shared_ptr<const AlignedPairSeries>& series,
                                               const EnvConfig& config) {
    if (!series) throw Error(Errc::InvalidArgument, "environment needs a series");
    config.validate();
    if (series->size() < config.window) {
        throw Error(Errc::SeriesTooShort,
                    fmt::format("series of {} samples is shorter than window {}", series->size(), config.window));
    }
    return std::make_shared<const SpreadTrace>(compute_spread_trace(*series, config.window, config.thresholds));
}

}  // namespace

TradingEnv::TradingEnv(std::shared_ptr<const AlignedPairSeries> series, EnvConfig config)
    : TradingEnv(series, build_trace(series, config), config) {}

TradingEnv::TradingEnv(std::shared_ptr<const AlignedPairSeries> series, std::shared_ptr<const SpreadTrace> trace,
                       EnvConfig config)
    : series_(std::move(series)),
      trace_(std::move(trace)),
      config_(config),
      rng_(config.seed),
      portfolio_(config.initial_cash, config.fee) {
    config_.validate();
    if (!series_ || !trace_) throw Error(Errc::InvalidArgument, "environment needs a series and a trace");
    if (trace_->window != config_.window || trace_->observations.size() != series_->size()) {
        throw Error(Errc::LengthMismatch, "spread trace does not match the series and window");
    }
    if (series_->size() < config_.window) {
        throw Error(Errc::SeriesTooShort, "series shorter than the spread window");
    }
}

std::size_t TradingEnv::ready_steps() const noexcept { return series_->size() - trace_->first_ready(); }

Observation TradingEnv::observe(std::size_t index) const {
    const auto& obs = trace_->observations[index];
    if (!obs) throw Error(Errc::NotWarm, fmt::format("no spread observation at index {}", index));
    Observation o;
    o.position = portfolio_.position_fraction(series_->prices_i[index], series_->prices_j[index]);
    o.z = obs->z;
    o.zone = classify_zone(obs->z, config_.thresholds);
    return o;
}

Observation TradingEnv::reset(std::optional<std::uint64_t> seed) {
    if (seed) rng_.seed(*seed);
    const std::size_t first = trace_->first_ready();
    const std::size_t n = series_->size();
    start_ = first;
    if (config_.random_start && config_.episode_length > 0 && n > first + config_.episode_length + 1) {
        std::uniform_int_distribution<std::size_t> pick(first, n - 1 - config_.episode_length);
        start_ = pick(rng_);
    }
    cursor_ = start_;
    steps_ = 0;
    done_ = false;
    portfolio_ = Portfolio(config_.initial_cash, config_.fee);
    observation_ = observe(cursor_);

    equity_ = EquityCurve{};
    equity_.intervals_per_year = 365.0 * 24.0 * 60.0 / static_cast<double>(interval_minutes(series_->interval));
    equity_.timestamps.push_back(series_->timestamps[cursor_] + interval_ms(series_->interval));
    equity_.values.push_back(config_.initial_cash);
    fractions_.clear();
    rows_.clear();
    return observation_;
}

double TradingEnv::target_for(const EnvAction& action, double position) const {
    if (config_.mode == EnvMode::RL1) {
        const auto* a = std::get_if<DiscreteAction>(&action);
        if (!a) throw Error(Errc::InvalidArgument, "RL1 expects a discrete action");
        switch (*a) {
            case DiscreteAction::OpenLongLeg: return position > 0.0 ? position : 1.0;
            case DiscreteAction::OpenShortLeg: return position < 0.0 ? position : -1.0;
            case DiscreteAction::Close: return 0.0;
        }
        return 0.0;
    }
    const auto* a = std::get_if<double>(&action);
    if (!a) throw Error(Errc::InvalidArgument, "RL2 expects a continuous action");
    // Holding the current position is allowed even after drift has carried |P| past 1.
    if (*a != position && !(std::abs(*a) <= 1.0)) {
        throw Error(Errc::TargetOutOfRange, fmt::format("action {} outside [-1, 1]", *a));
    }
    return *a;
}

StepResult TradingEnv::step(const EnvAction& action) {
    if (done_) throw Error(Errc::EpisodeFinished, "episode finished; call reset");
    const std::size_t t = cursor_;
    const std::size_t n = series_->size();
    const double pi = series_->prices_i[t];
    const double pj = series_->prices_j[t];
    const double position = observation_.position;
    const Zone zone = observation_.zone;

    const double target = target_for(action, position);
    const auto exec = portfolio_.execute(target, pi, pj, series_->timestamps[t]);
    const double value_after_trade = portfolio_.mark_to_market(pi, pj);

    double value_next = value_after_trade;
    if (t + 1 < n) {
        cursor_ = t + 1;
        value_next = portfolio_.mark_to_market(series_->prices_i[cursor_], series_->prices_j[cursor_]);
    }
    ++steps_;

    StepResult r;
    r.info.delta_pnl = value_next - value_after_trade;
    r.info.fees = exec.fees;
    r.info.trade_closed = exec.closed.has_value();
    r.info.realized_pnl = exec.closed ? exec.closed->realized_pnl : 0.0;
    r.info.target = target;
    r.info.value = value_next;

    int direction = 0;
    double action_value = 0.0;
    if (const auto* d = std::get_if<DiscreteAction>(&action)) {
        direction = *d == DiscreteAction::OpenLongLeg ? 1 : (*d == DiscreteAction::OpenShortLeg ? -1 : 0);
        action_value = static_cast<double>(direction);
    } else {
        action_value = std::get<double>(action);
        direction = action_value > config_.flat_band ? 1 : (action_value < -config_.flat_band ? -1 : 0);
    }
    r.breakdown.portfolio = r.info.realized_pnl / config_.initial_cash;
    r.breakdown.action = action_score(zone, direction);
    r.breakdown.transaction = std::abs(target - position);
    r.breakdown.signed_gap = position - target;

    if (config_.variant == RewardVariant::Shaped) {
        r.reward = shaped_reward(r.breakdown, config_.weights);
    } else if (config_.mode == EnvMode::RL1) {
        r.reward = plain_reward_rl1(r.info.delta_pnl, r.info.fees, exec.traded()) / config_.initial_cash;
    } else {
        r.reward = plain_reward_rl2(r.info.delta_pnl, action_value, r.info.fees) / config_.initial_cash;
    }

    const bool bankrupt = !(value_next > 0.0);
    if (bankrupt) {
        observation_ = Observation{0.0, trace_->observations[cursor_]->z,
                                   classify_zone(trace_->observations[cursor_]->z, config_.thresholds)};
    } else {
        observation_ = observe(cursor_);
    }
    done_ = bankrupt || cursor_ + 1 >= n || t + 1 >= n ||
            (config_.episode_length > 0 && steps_ >= config_.episode_length);
    r.observation = observation_;
    r.done = done_;

    equity_.timestamps.push_back(series_->timestamps[cursor_] + interval_ms(series_->interval));
    equity_.values.push_back(value_next);
    fractions_.push_back(observation_.position);

    EpisodeTraceRow row;
    row.timestamp = series_->timestamps[t];
    row.z = trace_->observations[t]->z;
    row.zone = zone;
    row.action = action_value;
    row.target = target;
    row.reward = r.reward;
    row.breakdown = r.breakdown;
    row.value = value_next;
    rows_.push_back(row);
    return r;
}

void write_episode_trace(std::ostream& out, std::span<const EpisodeTraceRow> rows) {
    out << "timestamp,z,zone,action,target,reward,portfolio,action_reward,transaction,signed_gap,value\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.timestamp, r.z, to_string(r.zone), r.action,
                           r.target, r.reward, r.breakdown.portfolio, r.breakdown.action, r.breakdown.transaction,
                           r.breakdown.signed_gap, r.value);
    }
}

namespace {

nlohmann::json obs_json(const Observation& o) {
    return nlohmann::json::array({o.position, o.z, static_cast<int>(o.zone)});
}

EnvAction parse_wire_action(const nlohmann::json& a, EnvMode mode) {
    if (mode == EnvMode::RL1) {
        if (a.is_string()) {
            const auto s = a.get<std::string>();
            if (s == "OpenLongLeg") return DiscreteAction::OpenLongLeg;
            if (s == "Close") return DiscreteAction::Close;
            if (s == "OpenShortLeg") return DiscreteAction::OpenShortLeg;
        } else if (a.is_number()) {
            const double v = a.get<double>();
            if (v == 1.0) return DiscreteAction::OpenLongLeg;
            if (v == 0.0) return DiscreteAction::Close;
            if (v == -1.0) return DiscreteAction::OpenShortLeg;
        }
        throw Error(Errc::ProtocolError, "RL1 action must be -1, 0, 1 or an action name");
    }
    if (!a.is_number()) throw Error(Errc::ProtocolError, "RL2 action must be a number");
    return a.get<double>();
}

}  // namespace

void serve_external(TradingEnv& env, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json reply;
        try {
            const auto req = nlohmann::json::parse(line, nullptr, false);
            if (req.is_discarded() || !req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
                throw Error(Errc::ProtocolError, "expected an object with a string \"cmd\"");
            }
            const auto cmd = req["cmd"].get<std::string>();
            if (cmd == "close") break;
            if (cmd == "reset") {
                std::optional<std::uint64_t> seed;
                if (req.contains("seed")) {
                    if (!req["seed"].is_number_unsigned()) throw Error(Errc::ProtocolError, "seed must be unsigned");
                    seed = req["seed"].get<std::uint64_t>();
                }
                reply["obs"] = obs_json(env.reset(seed));
            } else if (cmd == "step") {
                if (!req.contains("action")) throw Error(Errc::ProtocolError, "step needs an \"action\"");
                const auto result = env.step(parse_wire_action(req["action"], env.config().mode));
                reply["obs"] = obs_json(result.observation);
                reply["reward"] = result.reward;
                reply["done"] = result.done;
                reply["breakdown"] = {result.breakdown.portfolio, result.breakdown.action,
                                      result.breakdown.transaction};
            } else {
                throw Error(Errc::ProtocolError, fmt::format("unknown cmd '{}'", cmd));
            }
        } catch (const Error& e) {
            reply = nlohmann::json::object();
            reply["error"] = std::string(to_string(e.code()));
            if (e.code() != Errc::EpisodeFinished) reply["message"] = e.what();
        }
        out << reply.dump() << '\n' << std::flush;
    }
}

}  // namespace pairtrade
