// orchestrator.hpp
// Config-driven pipeline: ingest -> pairs -> gridsearch -> backtest / train ->
// eval -> report. Each command writes a directory named by the hash of the
// config subset it depends on, and refuses to read upstream output whose hash
// does not match the current config.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairtrade/actor_critic.hpp"
#include "pairtrade/grid_tuner.hpp"
#include "pairtrade/rl_environment.hpp"

namespace pairtrade {

struct Span {
    std::int64_t start_ms = 0;  // inclusive, UTC midnight
    std::int64_t end_ms = 0;    // exclusive
};

// "YYYY-MM-DD" at UTC midnight, in epoch ms.
std::int64_t parse_utc_date(std::string_view text);

struct RunConfig {
    std::filesystem::path base_dir;  // relative data paths resolve against this

    // [data]
    std::map<std::string, std::filesystem::path> symbols;
    Interval source_interval = Interval::M1;
    Interval interval = Interval::M1;
    double min_volume_quantile = 0.0;

    // [periods]
    Span formation;
    Span test;

    // [pairs]
    std::size_t pair_window = 1440;
    std::size_t pair_step = 1440;
    double significance = 0.05;

    // [grid]
    GridSpec grid = GridSpec::defaults();
    double grid_fee = 0.0002;  // fixed while tuning so --fee sweeps reuse one parameter set
    unsigned threads = 1;

    // [trading]
    double fee = 0.0002;
    double initial_cash = 10000.0;
    double risk_free_rate = 0.055;
    std::string policy = "gatev";  // gatev | flat | random
    std::optional<Thresholds> manual_thresholds;
    std::optional<std::size_t> manual_window;

    // [env]
    EnvMode mode = EnvMode::RL1;
    RewardVariant reward = RewardVariant::Shaped;
    RewardWeights weights{};
    double env_gamma = 0.99;
    std::size_t episode_length = 0;
    bool random_start = false;
    double flat_band = 0.05;

    // [agent]
    TrainConfig agent{};
    std::string eval_agent = "checkpoint";  // checkpoint | gatev | flat | random
    std::size_t eval_episodes = 1;

    // [run]
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";

    void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> fee;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> interval;
    std::optional<std::string> mode;
    std::optional<std::string> reward;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

// Hex SHA-256 of the canonical (sorted-key, compact) JSON dump.
std::string content_hash(const nlohmann::json& canonical);
std::string sha256_file(const std::filesystem::path& path);

struct CommandOutput {
    std::filesystem::path dir;
    std::string hash;
};

CommandOutput cmd_ingest(const RunConfig& config);
CommandOutput cmd_pairs(const RunConfig& config);
CommandOutput cmd_gridsearch(const RunConfig& config);
CommandOutput cmd_backtest(const RunConfig& config);
CommandOutput cmd_train(const RunConfig& config);
CommandOutput cmd_eval(const RunConfig& config);
// Merges metrics.json from the given run directories, or from every backtest
// and eval directory under config.out when `runs` is empty.
CommandOutput cmd_report(const RunConfig& config, const std::vector<std::filesystem::path>& runs, std::ostream& out);
void cmd_serve_env(const RunConfig& config, std::istream& in, std::ostream& out);

// Full command line. Exit codes: 0 ok, 2 config/usage, 3 data, 4 numeric.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace pairtrade
