#include <chrono>
#include <cstdio>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include <tomlplusplus/toml.hpp>

#include "pairtrade/errors.hpp"
#include "pairtrade/orchestrator.hpp"

namespace pairtrade {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

void check_keys(const toml::table& table, std::string_view section, const std::set<std::string_view>& allowed) {
    for (const auto& [key, node] : table) {
        if (!allowed.contains(key.str())) config_error(fmt::format("unknown key '{}' in [{}]", key.str(), section));
    }
}

const toml::table* section(const toml::table& root, std::string_view name) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    const auto* table = node->as_table();
    if (!table) config_error(fmt::format("[{}] must be a table", name));
    return table;
}

double get_number(const toml::table& t, std::string_view sec, std::string_view key, double fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if (auto v = node->value<double>()) return *v;
    config_error(fmt::format("[{}].{} must be a number", sec, key));
}

std::int64_t get_integer(const toml::table& t, std::string_view sec, std::string_view key, std::int64_t fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if (!node->is_integer()) config_error(fmt::format("[{}].{} must be an integer", sec, key));
    return *node->value<std::int64_t>();
}

std::size_t get_count(const toml::table& t, std::string_view sec, std::string_view key, std::size_t fallback) {
    const auto v = get_integer(t, sec, key, static_cast<std::int64_t>(fallback));
    if (v < 0) config_error(fmt::format("[{}].{} must be non-negative", sec, key));
    return static_cast<std::size_t>(v);
}

std::string get_string(const toml::table& t, std::string_view sec, std::string_view key, std::string fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if (auto v = node->value<std::string>()) return *v;
    config_error(fmt::format("[{}].{} must be a string", sec, key));
}

bool get_bool(const toml::table& t, std::string_view sec, std::string_view key, bool fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if (auto v = node->value<bool>()) return *v;
    config_error(fmt::format("[{}].{} must be a boolean", sec, key));
}

std::vector<double> get_numbers(const toml::table& t, std::string_view sec, std::string_view key,
                                std::vector<double> fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    const auto* arr = node->as_array();
    if (!arr) config_error(fmt::format("[{}].{} must be an array", sec, key));
    std::vector<double> out;
    for (const auto& item : *arr) {
        auto v = item.value<double>();
        if (!v) config_error(fmt::format("[{}].{} must contain numbers", sec, key));
        out.push_back(*v);
    }
    return out;
}

Span get_span(const toml::table& t, std::string_view key) {
    const auto* node = t.get(key);
    if (!node) config_error(fmt::format("[periods].{} is required", key));
    const auto* arr = node->as_array();
    if (!arr || arr->size() != 2) config_error(fmt::format("[periods].{} must be [\"start\", \"end\"]", key));
    Span span;
    for (std::size_t k = 0; k < 2; ++k) {
        auto v = (*arr)[k].value<std::string>();
        if (!v) config_error(fmt::format("[periods].{} dates must be strings", key));
        (k == 0 ? span.start_ms : span.end_ms) = parse_utc_date(*v);
    }
    return span;
}

}  // namespace

std::int64_t parse_utc_date(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        config_error(fmt::format("date '{}' is not YYYY-MM-DD", text));
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) config_error(fmt::format("date '{}' does not exist", text));
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch();
    return std::chrono::duration_cast<std::chrono::milliseconds>(days).count();
}

void RunConfig::validate() const {
    if (symbols.size() < 2) config_error("[data].symbols needs at least two symbols to form a pair");
    if (interval_minutes(interval) % interval_minutes(source_interval) != 0 ||
        interval_minutes(interval) < interval_minutes(source_interval)) {
        config_error("[data].interval must be a multiple of source_interval");
    }
    if (interval != source_interval && source_interval != Interval::M1) {
        config_error("resampling is only supported from 1m source data");
    }
    if (!(min_volume_quantile >= 0.0 && min_volume_quantile < 1.0)) config_error("min_volume_quantile must lie in [0, 1)");
    if (formation.start_ms >= formation.end_ms) config_error("formation period is empty");
    if (test.start_ms >= test.end_ms) config_error("test period is empty");
    if (formation.end_ms > test.start_ms) config_error("formation must end before the test period starts");
    if (pair_window < 20 || pair_step == 0) config_error("[pairs] window must be >= 20 and step > 0");
    if (significance != 0.01 && significance != 0.05 && significance != 0.10) {
        config_error("[pairs].significance must be 0.01, 0.05 or 0.10");
    }
    if (grid.open_thresholds.empty() || grid.close_thresholds.empty() || grid.windows.empty()) {
        config_error("[grid] lists must be non-empty");
    }
    if (!(fee >= 0.0 && fee <= 0.01)) config_error("[trading].fee must lie in [0, 0.01]");
    if (!(grid_fee >= 0.0 && grid_fee <= 0.01)) config_error("[grid].fee must lie in [0, 0.01]");
    if (!(initial_cash > 0.0)) config_error("[trading].initial_cash must be positive");
    if (!(risk_free_rate >= 0.0)) config_error("[trading].risk_free_rate must be >= 0");
    if (policy != "gatev" && policy != "flat" && policy != "random") config_error("[trading].policy must be gatev, flat or random");
    if (manual_thresholds) manual_thresholds->validate();
    if (manual_window && *manual_window < kMinSpreadWindow) config_error("[trading].window below minimum spread window");
    if (!(env_gamma >= 0.0 && env_gamma < 1.0)) config_error("[env].gamma must lie in [0, 1)");
    weights.validate();
    agent.validate();
    if (eval_agent != "checkpoint" && eval_agent != "gatev" && eval_agent != "flat" && eval_agent != "random") {
        config_error("[agent].eval must be checkpoint, gatev, flat or random");
    }
    if (eval_episodes == 0) config_error("[agent].eval_episodes must be positive");
}

RunConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        config_error(fmt::format("config parse error at line {}: {}", e.source().begin.line, e.description()));
    }
    check_keys(root, "root", {"data", "periods", "pairs", "grid", "trading", "env", "agent", "run"});

    RunConfig cfg;
    cfg.base_dir = base_dir;

    const auto* data = section(root, "data");
    if (!data) config_error("[data] section is required");
    check_keys(*data, "data", {"symbols", "source_interval", "interval", "min_volume_quantile"});
    const auto* symbols = data->get_as<toml::table>("symbols");
    if (!symbols) config_error("[data].symbols must be a table of SYMBOL = \"path\"");
    for (const auto& [name, node] : *symbols) {
        auto path = node.value<std::string>();
        if (!path) config_error(fmt::format("[data].symbols.{} must be a path string", name.str()));
        cfg.symbols[std::string(name.str())] = *path;
    }
    cfg.source_interval = parse_interval(get_string(*data, "data", "source_interval", "1m"));
    cfg.interval = parse_interval(get_string(*data, "data", "interval", "1m"));
    cfg.min_volume_quantile = get_number(*data, "data", "min_volume_quantile", 0.0);

    const auto* periods = section(root, "periods");
    if (!periods) config_error("[periods] section is required");
    check_keys(*periods, "periods", {"formation", "test"});
    cfg.formation = get_span(*periods, "formation");
    cfg.test = get_span(*periods, "test");

    if (const auto* pairs = section(root, "pairs")) {
        check_keys(*pairs, "pairs", {"window", "step", "significance"});
        cfg.pair_window = get_count(*pairs, "pairs", "window", cfg.pair_window);
        cfg.pair_step = get_count(*pairs, "pairs", "step", cfg.pair_step);
        cfg.significance = get_number(*pairs, "pairs", "significance", cfg.significance);
    }

    if (const auto* grid = section(root, "grid")) {
        check_keys(*grid, "grid", {"open", "close", "windows", "fee", "threads"});
        cfg.grid.open_thresholds = get_numbers(*grid, "grid", "open", cfg.grid.open_thresholds);
        cfg.grid.close_thresholds = get_numbers(*grid, "grid", "close", cfg.grid.close_thresholds);
        std::vector<double> fallback(cfg.grid.windows.begin(), cfg.grid.windows.end());
        cfg.grid.windows.clear();
        for (double w : get_numbers(*grid, "grid", "windows", fallback)) {
            if (w < 1 || w != static_cast<double>(static_cast<std::size_t>(w))) config_error("[grid].windows must be positive integers");
            cfg.grid.windows.push_back(static_cast<std::size_t>(w));
        }
        cfg.grid_fee = get_number(*grid, "grid", "fee", cfg.grid_fee);
        cfg.threads = static_cast<unsigned>(get_count(*grid, "grid", "threads", cfg.threads));
    }

    if (const auto* trading = section(root, "trading")) {
        check_keys(*trading, "trading",
                   {"fee", "initial_cash", "risk_free_rate", "policy", "open_threshold", "close_threshold", "window"});
        cfg.fee = get_number(*trading, "trading", "fee", cfg.fee);
        cfg.initial_cash = get_number(*trading, "trading", "initial_cash", cfg.initial_cash);
        cfg.risk_free_rate = get_number(*trading, "trading", "risk_free_rate", cfg.risk_free_rate);
        cfg.policy = get_string(*trading, "trading", "policy", cfg.policy);
        const bool has_ot = trading->contains("open_threshold");
        const bool has_ct = trading->contains("close_threshold");
        const bool has_w = trading->contains("window");
        if (has_ot || has_ct || has_w) {
            if (!(has_ot && has_ct && has_w)) {
                config_error("[trading] open_threshold, close_threshold and window must be given together");
            }
            cfg.manual_thresholds = Thresholds{get_number(*trading, "trading", "open_threshold", 0.0),
                                               get_number(*trading, "trading", "close_threshold", 0.0)};
            cfg.manual_window = get_count(*trading, "trading", "window", 0);
        }
    }

    if (const auto* env = section(root, "env")) {
        check_keys(*env, "env",
                   {"mode", "reward", "gamma", "episode_length", "random_start", "flat_band", "weights"});
        cfg.mode = parse_env_mode(get_string(*env, "env", "mode", "rl1"));
        cfg.reward = parse_reward_variant(get_string(*env, "env", "reward", "shaped"));
        cfg.env_gamma = get_number(*env, "env", "gamma", cfg.env_gamma);
        cfg.episode_length = get_count(*env, "env", "episode_length", cfg.episode_length);
        cfg.random_start = get_bool(*env, "env", "random_start", cfg.random_start);
        cfg.flat_band = get_number(*env, "env", "flat_band", cfg.flat_band);
        if (const auto* w = env->get("weights")) {
            const auto* wt = w->as_table();
            if (!wt) config_error("[env].weights must be a table");
            check_keys(*wt, "env.weights", {"portfolio", "action", "transaction"});
            cfg.weights.portfolio = get_number(*wt, "env.weights", "portfolio", cfg.weights.portfolio);
            cfg.weights.action = get_number(*wt, "env.weights", "action", cfg.weights.action);
            cfg.weights.transaction = get_number(*wt, "env.weights", "transaction", cfg.weights.transaction);
        }
    }

    if (const auto* agent = section(root, "agent")) {
        check_keys(*agent, "agent",
                   {"learning_rate", "n_steps", "gamma", "entropy_coef", "value_coef", "total_steps", "hidden",
                    "max_grad_norm", "eval", "eval_episodes"});
        auto& a = cfg.agent;
        a.learning_rate = get_number(*agent, "agent", "learning_rate", a.learning_rate);
        a.n_steps = get_count(*agent, "agent", "n_steps", a.n_steps);
        a.gamma = get_number(*agent, "agent", "gamma", a.gamma);
        a.entropy_coef = get_number(*agent, "agent", "entropy_coef", a.entropy_coef);
        a.value_coef = get_number(*agent, "agent", "value_coef", a.value_coef);
        a.total_steps = get_count(*agent, "agent", "total_steps", a.total_steps);
        a.max_grad_norm = get_number(*agent, "agent", "max_grad_norm", a.max_grad_norm);
        std::vector<double> fallback(a.hidden.begin(), a.hidden.end());
        a.hidden.clear();
        for (double h : get_numbers(*agent, "agent", "hidden", fallback)) {
            if (h < 1 || h != static_cast<double>(static_cast<std::size_t>(h))) config_error("[agent].hidden must be positive integers");
            a.hidden.push_back(static_cast<std::size_t>(h));
        }
        cfg.eval_agent = get_string(*agent, "agent", "eval", cfg.eval_agent);
        cfg.eval_episodes = get_count(*agent, "agent", "eval_episodes", cfg.eval_episodes);
    }

    if (const auto* run = section(root, "run")) {
        check_keys(*run, "run", {"seed", "out"});
        const auto seed = get_integer(*run, "run", "seed", 0);
        if (seed < 0) config_error("[run].seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.out = get_string(*run, "run", "out", cfg.out.string());
    }
    cfg.agent.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error(fmt::format("cannot read config {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.seed) {
        config.seed = *o.seed;
        config.agent.seed = *o.seed;
    }
    if (o.fee) config.fee = *o.fee;
    if (o.out) config.out = *o.out;
    if (o.interval) config.interval = parse_interval(*o.interval);
    if (o.mode) config.mode = parse_env_mode(*o.mode);
    if (o.reward) config.reward = parse_reward_variant(*o.reward);
    config.validate();
}

}  // namespace pairtrade
