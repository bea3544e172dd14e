// policies.hpp
// Rule-based baselines behind the same observe -> target-fraction interface the
// learned agents use.

#pragma once

#include <cstdint>
#include <random>

#include "pairtrade/spread_engine.hpp"

namespace pairtrade {

struct Observation {
    double position = 0.0;  // P in [-1, 1]
    double z = 0.0;
    Zone zone = Zone::CloseZone;
};

struct PolicyDecision {
    double target = 0.0;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision decide(const Observation& obs) = 0;
};

// Threshold rule: short the spread in ShortZone, long it in LongZone, flatten in
// CloseZone, hold in the neutral zones. An already-open leg in its own zone is
// held rather than topped up.
PolicyDecision gatev_policy(const Observation& obs);
PolicyDecision flat_policy(const Observation& obs);

enum class ActionSet {
    Discrete,    // {-1, 0, +1}
    Continuous,  // [-1, 1]
};

class GatevPolicy final : public Policy {
public:
    PolicyDecision decide(const Observation& obs) override { return gatev_policy(obs); }
};

class FlatPolicy final : public Policy {
public:
    PolicyDecision decide(const Observation& obs) override { return flat_policy(obs); }
};

class RandomPolicy final : public Policy {
public:
    RandomPolicy(std::uint64_t seed, ActionSet actions);
    PolicyDecision decide(const Observation& obs) override;

private:
    std::mt19937_64 rng_;
    ActionSet actions_;
};

}  // namespace pairtrade
