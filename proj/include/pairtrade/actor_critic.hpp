// actor_critic.hpp
// Advantage actor-critic with a categorical head for RL1 and a tanh-squashed
// Gaussian head for RL2. Dense ReLU networks, hand-written gradients, plain SGD.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pairtrade/rl_environment.hpp"

namespace pairtrade {

constexpr std::size_t kObservationSize = 2 + kZoneCount;  // [P, z, one-hot zone]
constexpr double kZClip = 10.0;

Eigen::VectorXd encode_observation(const Observation& obs);

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
};

struct Mlp {
    std::vector<DenseLayer> layers;

    std::size_t input_size() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols()); }
    std::size_t output_size() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows()); }
    std::size_t parameter_count() const;
    // Columns are samples.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
};

enum class ActionHead { Categorical, SquashedGaussian };

std::string_view to_string(ActionHead head) noexcept;

struct AgentParams {
    Mlp policy;
    Mlp value;
    ActionHead head = ActionHead::Categorical;
    double log_std = -0.5;  // SquashedGaussian only; state independent
    int version = 1;

    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    void assign(const std::vector<double>& flat);
    bool finite() const;
};

// He-initialized networks; the policy output layer is scaled down so the
// initial policy is close to uniform.
AgentParams init_agent(ActionHead head, const std::vector<std::size_t>& hidden, std::uint64_t seed);

enum class ActMode { Stochastic, Deterministic };

struct ActOutcome {
    EnvAction action;
    int index = 0;           // categorical choice
    double pre_squash = 0.0;  // Gaussian sample before tanh
};

ActOutcome act(const AgentParams& params, const Observation& obs, ActMode mode, std::mt19937_64& rng);
ActOutcome act(const AgentParams& params, const Observation& obs, ActMode mode, std::uint64_t seed);

// Categorical probabilities for one observation.
Eigen::VectorXd action_probabilities(const AgentParams& params, const Observation& obs);
double state_value(const AgentParams& params, const Observation& obs);

struct Transition {
    Eigen::VectorXd state;  // encoded observation
    int action_index = 0;
    double pre_squash = 0.0;
    double advantage = 0.0;
    double return_target = 0.0;
};

struct LossCoefficients {
    double entropy = 0.01;
    double value = 0.5;
};

struct LossBreakdown {
    double policy = 0.0;  // mean(-log pi * A) - entropy_coef * mean(H)
    double value = 0.0;   // value_coef * mean((V - G)^2)
    double entropy = 0.0; // mean(H)
    double total() const { return policy + value; }
};

struct LossAndGradient {
    LossBreakdown loss;
    std::vector<double> gradient;  // same layout as AgentParams::flatten
};

LossBreakdown evaluate_loss(const AgentParams& params, const std::vector<Transition>& batch, const LossCoefficients& coef);
LossAndGradient loss_and_gradient(const AgentParams& params, const std::vector<Transition>& batch,
                                  const LossCoefficients& coef);

using GradientFn = std::function<LossAndGradient(const AgentParams&, const std::vector<Transition>&,
                                                 const LossCoefficients&)>;

// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-6),
// numeric by central differences with step h.
double grad_check(const AgentParams& params, const std::vector<Transition>& batch, const LossCoefficients& coef,
                  const GradientFn& gradient = loss_and_gradient, double h = 1e-5);

// Scales the gradient to at most max_norm, then params -= lr * gradient.
void sgd_step(AgentParams& params, std::vector<double> gradient, double learning_rate, double max_norm);

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t n_steps = 16;
    double gamma = 0.9;
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    std::size_t total_steps = 200000;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden{64, 64};
    double max_grad_norm = 0.5;

    void validate() const;
};

struct TrainLog {
    std::vector<double> episode_returns;
    std::vector<double> losses;
    std::size_t updates = 0;
};

AgentParams train(TradingEnv& env, const TrainConfig& config, TrainLog* log = nullptr);
// Continues from existing parameters.
AgentParams train(TradingEnv& env, const TrainConfig& config, AgentParams params, TrainLog* log);

class Agent {
public:
    virtual ~Agent() = default;
    virtual EnvAction act(const Observation& obs) = 0;
};

class ParamsAgent final : public Agent {
public:
    ParamsAgent(AgentParams params, ActMode mode, std::uint64_t seed);
    EnvAction act(const Observation& obs) override;

private:
    AgentParams params_;
    ActMode mode_;
    std::mt19937_64 rng_;
};

// Adapts a target-fraction policy to an environment's action space.
class PolicyAgent final : public Agent {
public:
    PolicyAgent(Policy& policy, EnvMode mode) : policy_(policy), mode_(mode) {}
    EnvAction act(const Observation& obs) override;

private:
    Policy& policy_;
    EnvMode mode_;
};

struct EvaluationResult {
    std::vector<double> returns;  // undiscounted reward sum per episode
    std::vector<MetricsReport> reports;
    std::vector<TradeRecord> trades;  // all episodes
    std::size_t zone_steps = 0;       // steps taken in non-neutral zones
    std::size_t zone_agreements = 0;  // of which took the zone's rewarded action
    double agreement() const { return zone_steps == 0 ? 0.0 : static_cast<double>(zone_agreements) / static_cast<double>(zone_steps); }
};

// Episode k resets with seed base_seed + k.
EvaluationResult evaluate(Agent& agent, TradingEnv& env, std::size_t episodes, std::uint64_t base_seed,
                          const MetricsConfig& metrics = {});
EvaluationResult evaluate(const AgentParams& params, TradingEnv& env, std::size_t episodes, ActMode mode,
                          std::uint64_t base_seed, const MetricsConfig& metrics = {});

// Binary: "PTAC1", header of layer sizes, little-endian doubles; sidecar JSON at path + ".json".
void save_checkpoint(const std::filesystem::path& path, const AgentParams& params, const nlohmann::json& sidecar);
AgentParams load_checkpoint(const std::filesystem::path& path);

}  // namespace pairtrade
