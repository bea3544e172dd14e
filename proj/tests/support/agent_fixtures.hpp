// agent_fixtures.hpp
// Random transition batches and a deliberately broken gradient for the checker.

#pragma once

#include <random>
#include <vector>

#include "pairtrade/actor_critic.hpp"

namespace pairtrade::testing {

inline std::vector<Transition> random_batch(ActionHead head, std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> zone(0, kZoneCount - 1);
    std::uniform_int_distribution<int> action(0, 2);
    std::uniform_real_distribution<double> position(-1.0, 1.0);
    std::vector<Transition> batch;
    for (std::size_t k = 0; k < size; ++k) {
        Transition tr;
        tr.state = encode_observation({position(rng), 2.0 * normal(rng), static_cast<Zone>(zone(rng))});
        tr.action_index = head == ActionHead::Categorical ? action(rng) : 0;
        tr.pre_squash = head == ActionHead::SquashedGaussian ? normal(rng) : 0.0;
        tr.advantage = normal(rng);
        tr.return_target = normal(rng);
        batch.push_back(tr);
    }
    return batch;
}

// Negative control: the analytic gradient with the last policy layer's weight
// gradient scaled by 1.5, as if a factor had been dropped from the backward pass.
inline LossAndGradient corrupted_gradient(const AgentParams& params, const std::vector<Transition>& batch,
                                          const LossCoefficients& coef) {
    auto lg = loss_and_gradient(params, batch, coef);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < params.policy.layers.size(); ++l) {
        offset += static_cast<std::size_t>(params.policy.layers[l].weight.size() + params.policy.layers[l].bias.size());
    }
    const auto count = static_cast<std::size_t>(params.policy.layers.back().weight.size());
    for (std::size_t k = 0; k < count; ++k) lg.gradient[offset + k] *= 1.5;
    return lg;
}

}  // namespace pairtrade::testing
