#include "pairtrade/policies.hpp"

namespace pairtrade {

PolicyDecision gatev_policy(const Observation& obs) {
    switch (obs.zone) {
        case Zone::ShortZone:
            return {obs.position < 0.0 ? obs.position : -1.0};
        case Zone::LongZone:
            return {obs.position > 0.0 ? obs.position : 1.0};
        case Zone::CloseZone:
            return {0.0};
        case Zone::NeutralShortZone:
        case Zone::NeutralLongZone:
            break;
    }
    return {obs.position};
}

PolicyDecision flat_policy(const Observation&) { return {0.0}; }

RandomPolicy::RandomPolicy(std::uint64_t seed, ActionSet actions) : rng_(seed), actions_(actions) {}

PolicyDecision RandomPolicy::decide(const Observation&) {
    if (actions_ == ActionSet::Discrete) {
        std::uniform_int_distribution<int> pick(-1, 1);
        return {static_cast<double>(pick(rng_))};
    }
    std::uniform_real_distribution<double> draw(-1.0, 1.0);
    return {draw(rng_)};
}

}  // namespace pairtrade
