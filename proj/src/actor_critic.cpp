#include "pairtrade/actor_critic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <numbers>

#include "pairtrade/errors.hpp"

namespace pairtrade {

namespace {

constexpr std::array<char, 5> kMagic{'P', 'T', 'A', 'C', '1'};
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> act;   // act[0] = input, act[l+1] = output of layer l
};

Eigen::MatrixXd forward_cached(const Mlp& net, const Eigen::MatrixXd& x, ForwardCache& cache) {
    cache.pre.clear();
    cache.act.clear();
    cache.act.push_back(x);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        Eigen::MatrixXd u = layer.weight * cache.act.back();
        u.colwise() += layer.bias;
        cache.pre.push_back(u);
        if (l + 1 < net.layers.size()) {
            cache.act.push_back(u.cwiseMax(0.0));
        } else {
            cache.act.push_back(u);
        }
    }
    return cache.act.back();
}

// Accumulates dLoss/dparams into `grads` (same shapes as net) given dLoss/doutput.
void backward(const Mlp& net, const ForwardCache& cache, Eigen::MatrixXd d_pre, std::vector<DenseLayer>& grads) {
    grads.resize(net.layers.size());
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        grads[l].weight = d_pre * cache.act[l].transpose();
        grads[l].bias = d_pre.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd d_act = net.layers[l].weight.transpose() * d_pre;
        d_pre = d_act.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
}

void append_layers(const std::vector<DenseLayer>& layers, std::vector<double>& out) {
    for (const auto& layer : layers) {
        out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
        out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
    }
}

std::size_t read_layers(std::vector<DenseLayer>& layers, const std::vector<double>& flat, std::size_t pos) {
    for (auto& layer : layers) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), layer.weight.size(), layer.weight.data());
        pos += static_cast<std::size_t>(layer.weight.size());
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), layer.bias.size(), layer.bias.data());
        pos += static_cast<std::size_t>(layer.bias.size());
    }
    return pos;
}

Mlp make_mlp(const std::vector<std::size_t>& sizes) {
    Mlp net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        DenseLayer layer;
        layer.weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sizes[l + 1]), static_cast<Eigen::Index>(sizes[l]));
        layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sizes[l + 1]));
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<std::size_t> layer_sizes(const Mlp& net) {
    std::vector<std::size_t> sizes;
    if (net.layers.empty()) return sizes;
    sizes.push_back(net.input_size());
    for (const auto& layer : net.layers) sizes.push_back(static_cast<std::size_t>(layer.weight.rows()));
    return sizes;
}

Eigen::MatrixXd stack_states(const std::vector<Transition>& batch) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(kObservationSize), static_cast<Eigen::Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) x.col(static_cast<Eigen::Index>(b)) = batch[b].state;
    return x;
}

void ensure_finite(const AgentParams& params) {
    if (!params.finite()) throw Error(Errc::NonFiniteParams, "agent parameters contain non-finite values");
}

// Loss over the batch; fills gradients when `grad` is non-null.
LossBreakdown compute_loss(const AgentParams& params, const std::vector<Transition>& batch, const LossCoefficients& coef,
                           std::vector<double>* grad) {
    if (batch.empty()) throw Error(Errc::InvalidArgument, "empty transition batch");
    const auto x = stack_states(batch);
    const auto bsz = static_cast<double>(batch.size());
    const auto cols = static_cast<Eigen::Index>(batch.size());

    ForwardCache pcache, vcache;
    const Eigen::MatrixXd out = forward_cached(params.policy, x, pcache);
    const Eigen::MatrixXd values = forward_cached(params.value, x, vcache);

    LossBreakdown loss;
    Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(out.rows(), cols);
    double d_log_std = 0.0;

    if (params.head == ActionHead::Categorical) {
        for (Eigen::Index b = 0; b < cols; ++b) {
            const Eigen::VectorXd logits = out.col(b);
            const double m = logits.maxCoeff();
            const double lse = m + std::log((logits.array() - m).exp().sum());
            const Eigen::VectorXd logp = logits.array() - lse;
            const Eigen::VectorXd p = logp.array().exp();
            const double entropy = -(p.array() * logp.array()).sum();
            const auto& tr = batch[static_cast<std::size_t>(b)];
            loss.policy += -logp(tr.action_index) * tr.advantage - coef.entropy * entropy;
            loss.entropy += entropy;
            for (Eigen::Index k = 0; k < logits.size(); ++k) {
                const double onehot = k == tr.action_index ? 1.0 : 0.0;
                d_out(k, b) = (-tr.advantage * (onehot - p(k)) + coef.entropy * p(k) * (logp(k) + entropy)) / bsz;
            }
        }
    } else {
        const double sigma = std::exp(params.log_std);
        const double entropy = 0.5 * (1.0 + kLog2Pi) + params.log_std;
        for (Eigen::Index b = 0; b < cols; ++b) {
            const auto& tr = batch[static_cast<std::size_t>(b)];
            const double mu = out(0, b);
            const double s = (tr.pre_squash - mu) / sigma;
            const double log_prob = -0.5 * s * s - params.log_std - 0.5 * kLog2Pi;
            loss.policy += -log_prob * tr.advantage - coef.entropy * entropy;
            loss.entropy += entropy;
            d_out(0, b) = -tr.advantage * s / sigma / bsz;
            d_log_std += (-tr.advantage * (s * s - 1.0) - coef.entropy) / bsz;
        }
    }
    loss.policy /= bsz;
    loss.entropy /= bsz;

    Eigen::MatrixXd d_value(1, cols);
    for (Eigen::Index b = 0; b < cols; ++b) {
        const double err = values(0, b) - batch[static_cast<std::size_t>(b)].return_target;
        loss.value += err * err;
        d_value(0, b) = 2.0 * coef.value * err / bsz;
    }
    loss.value *= coef.value / bsz;

    if (grad) {
        std::vector<DenseLayer> pg, vg;
        backward(params.policy, pcache, d_out, pg);
        backward(params.value, vcache, d_value, vg);
        grad->clear();
        grad->reserve(params.parameter_count());
        append_layers(pg, *grad);
        if (params.head == ActionHead::SquashedGaussian) grad->push_back(d_log_std);
        append_layers(vg, *grad);
    }
    return loss;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
        const int c = in.get();
        if (c == EOF) throw Error(Errc::CheckpointFormat, "truncated checkpoint header");
        v |= static_cast<std::uint32_t>(c & 0xFF) << (8 * k);
    }
    return v;
}

void write_f64(std::ostream& out, double d) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    for (int k = 0; k < 8; ++k) out.put(static_cast<char>((bits >> (8 * k)) & 0xFF));
}

double read_f64(std::istream& in) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) {
        const int c = in.get();
        if (c == EOF) throw Error(Errc::CheckpointFormat, "truncated checkpoint body");
        bits |= static_cast<std::uint64_t>(c & 0xFF) << (8 * k);
    }
    double d = 0.0;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

void write_sizes(std::ostream& out, const std::vector<std::size_t>& sizes) {
    write_u32(out, static_cast<std::uint32_t>(sizes.size()));
    for (auto s : sizes) write_u32(out, static_cast<std::uint32_t>(s));
}

std::vector<std::size_t> read_sizes(std::istream& in) {
    const auto count = read_u32(in);
    if (count < 2 || count > 64) throw Error(Errc::CheckpointFormat, "implausible layer count");
    std::vector<std::size_t> sizes;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto s = read_u32(in);
        if (s == 0 || s > (1u << 20)) throw Error(Errc::CheckpointFormat, "implausible layer size");
        sizes.push_back(s);
    }
    return sizes;
}

}  // namespace

Eigen::VectorXd encode_observation(const Observation& obs) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kObservationSize));
    x(0) = obs.position;
    x(1) = std::clamp(obs.z, -kZClip, kZClip);
    x(2 + static_cast<int>(obs.zone)) = 1.0;
    return x;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    return n;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
    ForwardCache cache;
    return forward_cached(*this, x, cache);
}

std::string_view to_string(ActionHead head) noexcept {
    return head == ActionHead::Categorical ? "categorical" : "squashed_gaussian";
}

std::size_t AgentParams::parameter_count() const {
    return policy.parameter_count() + value.parameter_count() + (head == ActionHead::SquashedGaussian ? 1 : 0);
}

std::vector<double> AgentParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    append_layers(policy.layers, flat);
    if (head == ActionHead::SquashedGaussian) flat.push_back(log_std);
    append_layers(value.layers, flat);
    return flat;
}

void AgentParams::assign(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) throw Error(Errc::LengthMismatch, "flat parameter vector has the wrong size");
    std::size_t pos = read_layers(policy.layers, flat, 0);
    if (head == ActionHead::SquashedGaussian) log_std = flat[pos++];
    read_layers(value.layers, flat, pos);
}

bool AgentParams::finite() const {
    const auto flat = flatten();
    return std::all_of(flat.begin(), flat.end(), [](double v) { return std::isfinite(v); });
}

AgentParams init_agent(ActionHead head, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    std::vector<std::size_t> sizes{kObservationSize};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    auto policy_sizes = sizes;
    policy_sizes.push_back(head == ActionHead::Categorical ? 3 : 1);
    auto value_sizes = sizes;
    value_sizes.push_back(1);

    AgentParams params;
    params.head = head;
    params.policy = make_mlp(policy_sizes);
    params.value = make_mlp(value_sizes);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto fill = [&](Mlp& net, double output_scale) {
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            auto& w = net.layers[l].weight;
            const bool output = l + 1 == net.layers.size();
            const double scale = std::sqrt((output ? 1.0 : 2.0) / static_cast<double>(w.cols())) * (output ? output_scale : 1.0);
            for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = scale * normal(rng);
        }
    };
    fill(params.policy, 0.01);
    fill(params.value, 1.0);
    return params;
}

Eigen::VectorXd action_probabilities(const AgentParams& params, const Observation& obs) {
    if (params.head != ActionHead::Categorical) throw Error(Errc::InvalidArgument, "not a categorical head");
    const Eigen::VectorXd logits = params.policy.forward(encode_observation(obs));
    const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

double state_value(const AgentParams& params, const Observation& obs) {
    return params.value.forward(encode_observation(obs))(0, 0);
}

ActOutcome act(const AgentParams& params, const Observation& obs, ActMode mode, std::mt19937_64& rng) {
    ensure_finite(params);
    ActOutcome outcome;
    if (params.head == ActionHead::Categorical) {
        const auto p = action_probabilities(params, obs);
        int choice = 0;
        if (mode == ActMode::Deterministic) {
            p.maxCoeff(&choice);
        } else {
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            const double u = uniform(rng);
            double cumulative = 0.0;
            choice = static_cast<int>(p.size()) - 1;
            for (Eigen::Index k = 0; k < p.size(); ++k) {
                cumulative += p(k);
                if (u < cumulative) {
                    choice = static_cast<int>(k);
                    break;
                }
            }
        }
        outcome.index = choice;
        outcome.action = static_cast<DiscreteAction>(choice);
        return outcome;
    }
    const double mu = params.policy.forward(encode_observation(obs))(0, 0);
    double u = mu;
    if (mode == ActMode::Stochastic) {
        std::normal_distribution<double> normal(0.0, 1.0);
        u = mu + std::exp(params.log_std) * normal(rng);
    }
    outcome.pre_squash = u;
    outcome.action = std::tanh(u);
    return outcome;
}

ActOutcome act(const AgentParams& params, const Observation& obs, ActMode mode, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return act(params, obs, mode, rng);
}

LossBreakdown evaluate_loss(const AgentParams& params, const std::vector<Transition>& batch, const LossCoefficients& coef) {
    return compute_loss(params, batch, coef, nullptr);
}

LossAndGradient loss_and_gradient(const AgentParams& params, const std::vector<Transition>& batch,
                                  const LossCoefficients& coef) {
    LossAndGradient out;
    out.loss = compute_loss(params, batch, coef, &out.gradient);
    return out;
}

double grad_check(const AgentParams& params, const std::vector<Transition>& batch, const LossCoefficients& coef,
                  const GradientFn& gradient, double h) {
    const auto analytic = gradient(params, batch, coef).gradient;
    auto flat = params.flatten();
    if (analytic.size() != flat.size()) throw Error(Errc::LengthMismatch, "gradient size differs from parameter count");
    AgentParams probe = params;
    double worst = 0.0;
    for (std::size_t k = 0; k < flat.size(); ++k) {
        const double saved = flat[k];
        flat[k] = saved + h;
        probe.assign(flat);
        const double up = evaluate_loss(probe, batch, coef).total();
        flat[k] = saved - h;
        probe.assign(flat);
        const double down = evaluate_loss(probe, batch, coef).total();
        flat[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
    }
    return worst;
}

void sgd_step(AgentParams& params, std::vector<double> gradient, double learning_rate, double max_norm) {
    double norm_sq = 0.0;
    for (double g : gradient) norm_sq += g * g;
    const double norm = std::sqrt(norm_sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : gradient) g *= scale;
    }
    auto flat = params.flatten();
    for (std::size_t k = 0; k < flat.size(); ++k) flat[k] -= learning_rate * gradient[k];
    params.assign(flat);
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw Error(Errc::InvalidArgument, "learning rate must be >= 0");
    if (n_steps == 0 || total_steps == 0) throw Error(Errc::InvalidArgument, "n_steps and total_steps must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(Errc::InvalidArgument, "gamma must lie in [0, 1)");
    if (entropy_coef < 0.0 || value_coef < 0.0) throw Error(Errc::InvalidArgument, "loss coefficients must be >= 0");
    if (hidden.empty()) throw Error(Errc::InvalidArgument, "need at least one hidden layer");
}

AgentParams train(TradingEnv& env, const TrainConfig& config, TrainLog* log) {
    const auto head = env.config().mode == EnvMode::RL1 ? ActionHead::Categorical : ActionHead::SquashedGaussian;
    return train(env, config, init_agent(head, config.hidden, config.seed), log);
}

AgentParams train(TradingEnv& env, const TrainConfig& config, AgentParams params, TrainLog* log) {
    config.validate();
    const auto expected = env.config().mode == EnvMode::RL1 ? ActionHead::Categorical : ActionHead::SquashedGaussian;
    if (params.head != expected) throw Error(Errc::InvalidArgument, "action head does not match the environment mode");

    std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
    const LossCoefficients coef{config.entropy_coef, config.value_coef};
    Observation obs = env.reset(config.seed);
    double episode_return = 0.0;
    std::size_t steps = 0;

    std::vector<Transition> batch;
    std::vector<double> rewards;
    std::vector<char> dones;
    while (steps < config.total_steps) {
        batch.clear();
        rewards.clear();
        dones.clear();
        while (batch.size() < config.n_steps && steps < config.total_steps) {
            Transition tr;
            tr.state = encode_observation(obs);
            const auto outcome = act(params, obs, ActMode::Stochastic, rng);
            tr.action_index = outcome.index;
            tr.pre_squash = outcome.pre_squash;
            const auto result = env.step(outcome.action);
            ++steps;
            episode_return += result.reward;
            batch.push_back(std::move(tr));
            rewards.push_back(result.reward);
            dones.push_back(result.done ? 1 : 0);
            if (result.done) {
                if (log) log->episode_returns.push_back(episode_return);
                episode_return = 0.0;
                obs = env.reset();
            } else {
                obs = result.observation;
            }
        }

        double g = dones.back() ? 0.0 : state_value(params, obs);
        for (std::size_t k = batch.size(); k-- > 0;) {
            if (dones[k]) g = 0.0;
            g = rewards[k] + config.gamma * g;
            batch[k].return_target = g;
        }
        const Eigen::MatrixXd values = params.value.forward(stack_states(batch));
        for (std::size_t k = 0; k < batch.size(); ++k) {
            batch[k].advantage = batch[k].return_target - values(0, static_cast<Eigen::Index>(k));
        }

        auto lg = loss_and_gradient(params, batch, coef);
        const double total = lg.loss.total();
        if (!std::isfinite(total)) throw Error(Errc::DivergedTraining, fmt::format("non-finite loss after {} steps", steps));
        sgd_step(params, std::move(lg.gradient), config.learning_rate, config.max_grad_norm);
        if (!params.finite()) throw Error(Errc::DivergedTraining, fmt::format("non-finite parameters after {} steps", steps));
        if (log) {
            log->losses.push_back(total);
            ++log->updates;
        }
    }
    return params;
}

ParamsAgent::ParamsAgent(AgentParams params, ActMode mode, std::uint64_t seed)
    : params_(std::move(params)), mode_(mode), rng_(seed) {}

EnvAction ParamsAgent::act(const Observation& obs) { return pairtrade::act(params_, obs, mode_, rng_).action; }

EnvAction PolicyAgent::act(const Observation& obs) {
    const double target = policy_.decide(obs).target;
    if (mode_ == EnvMode::RL2) return target;
    if (target > 0.0) return DiscreteAction::OpenLongLeg;
    if (target < 0.0) return DiscreteAction::OpenShortLeg;
    return DiscreteAction::Close;
}

EvaluationResult evaluate(Agent& agent, TradingEnv& env, std::size_t episodes, std::uint64_t base_seed,
                          const MetricsConfig& metrics) {
    if (episodes == 0) throw Error(Errc::InvalidArgument, "episodes must be positive");
    EvaluationResult result;
    for (std::size_t k = 0; k < episodes; ++k) {
        Observation obs = env.reset(base_seed + k);
        double total = 0.0;
        while (!env.done()) {
            const Zone zone = obs.zone;
            const auto step = env.step(agent.act(obs));
            total += step.reward;
            if (rewarded_direction(zone)) {
                ++result.zone_steps;
                if (step.breakdown.action > 0.0) ++result.zone_agreements;
            }
            obs = step.observation;
        }
        result.returns.push_back(total);
        const auto& trades = env.portfolio().trades();
        result.reports.push_back(compute_report(env.equity(), trades, env.position_fractions(), metrics));
        result.trades.insert(result.trades.end(), trades.begin(), trades.end());
    }
    return result;
}

EvaluationResult evaluate(const AgentParams& params, TradingEnv& env, std::size_t episodes, ActMode mode,
                          std::uint64_t base_seed, const MetricsConfig& metrics) {
    ParamsAgent agent(params, mode, base_seed);
    return evaluate(agent, env, episodes, base_seed, metrics);
}

void save_checkpoint(const std::filesystem::path& path, const AgentParams& params, const nlohmann::json& sidecar) {
    ensure_finite(params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, fmt::format("cannot write checkpoint {}", path.string()));
    out.write(kMagic.data(), kMagic.size());
    write_u32(out, static_cast<std::uint32_t>(params.version));
    out.put(static_cast<char>(params.head == ActionHead::Categorical ? 0 : 1));
    write_sizes(out, layer_sizes(params.policy));
    write_sizes(out, layer_sizes(params.value));
    const auto flat = params.flatten();
    write_u32(out, static_cast<std::uint32_t>(flat.size()));
    for (double v : flat) write_f64(out, v);
    if (!out) throw Error(Errc::IoError, fmt::format("failed writing checkpoint {}", path.string()));

    std::ofstream side(path.string() + ".json");
    if (!side) throw Error(Errc::IoError, "cannot write checkpoint sidecar");
    nlohmann::json meta = sidecar;
    meta["format"] = "PTAC1";
    meta["head"] = std::string(to_string(params.head));
    meta["policy_layers"] = layer_sizes(params.policy);
    meta["value_layers"] = layer_sizes(params.value);
    meta["parameters"] = flat.size();
    side << meta.dump(2) << '\n';
}

AgentParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, fmt::format("cannot read checkpoint {}", path.string()));
    std::array<char, 5> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw Error(Errc::CheckpointFormat, "bad checkpoint magic");
    AgentParams params;
    params.version = static_cast<int>(read_u32(in));
    const int head = in.get();
    if (head != 0 && head != 1) throw Error(Errc::CheckpointFormat, "unknown action head");
    params.head = head == 0 ? ActionHead::Categorical : ActionHead::SquashedGaussian;
    params.policy = make_mlp(read_sizes(in));
    params.value = make_mlp(read_sizes(in));
    if (params.policy.input_size() != kObservationSize || params.value.input_size() != kObservationSize ||
        params.value.output_size() != 1 ||
        params.policy.output_size() != (params.head == ActionHead::Categorical ? 3u : 1u)) {
        throw Error(Errc::CheckpointFormat, "layer sizes do not fit the observation or action head");
    }
    const auto count = read_u32(in);
    if (count != params.parameter_count()) throw Error(Errc::CheckpointFormat, "parameter count mismatch");
    std::vector<double> flat(count);
    for (auto& v : flat) v = read_f64(in);
    if (in.peek() != EOF) throw Error(Errc::CheckpointFormat, "trailing bytes after checkpoint body");
    params.assign(flat);
    ensure_finite(params);
    return params;
}

}  // namespace pairtrade
