#include "pairtrade/orchestrator.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "pairtrade/econometrics.hpp"
#include "pairtrade/errors.hpp"

namespace pairtrade {

namespace fs = std::filesystem;
using nlohmann::json;

std::string content_hash(const json& canonical) {
    const std::string text = canonical.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(Errc::InvalidArgument, "SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int k = 0; k < length; ++k) hex += fmt::format("{:02x}", digest[k]);
    return hex;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, fmt::format("cannot read {}", path.string()));
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buffer[1 << 16];
    while (in) {
        in.read(buffer, sizeof buffer);
        EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest, &length);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int k = 0; k < length; ++k) hex += fmt::format("{:02x}", digest[k]);
    return hex;
}

namespace {

// ---- artifact plumbing --------------------------------------------------

fs::path resolve(const RunConfig& cfg, const fs::path& p) { return p.is_absolute() ? p : cfg.base_dir / p; }

struct Stage {
    std::string name;
    json key;
    std::string hash;

    fs::path dir(const RunConfig& cfg) const { return cfg.out / fmt::format("{}-{}", name, hash.substr(0, 16)); }
};

Stage make_stage(std::string name, json key) {
    key["stage"] = name;
    Stage s{std::move(name), std::move(key), ""};
    s.hash = content_hash(s.key);
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, fmt::format("cannot write {}", path.string()));
    out << text;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::StaleArtifact, fmt::format("missing artifact {}", path.string()));
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::IoError, fmt::format("corrupt artifact {}", path.string()));
    return j;
}

fs::path open_stage(const RunConfig& cfg, const Stage& stage) {
    const auto dir = stage.dir(cfg);
    fs::create_directories(dir);
    json manifest;
    manifest["stage"] = stage.name;
    manifest["hash"] = stage.hash;
    manifest["key"] = stage.key;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return dir;
}

// Upstream output must exist under the hash the current config implies.
fs::path require_stage(const RunConfig& cfg, const Stage& stage) {
    const auto dir = stage.dir(cfg);
    if (!fs::exists(dir / "manifest.json")) {
        throw Error(Errc::StaleArtifact,
                    fmt::format("no {} artifact for the current config (expected {}); run `{}` first", stage.name,
                                dir.string(), stage.name));
    }
    if (read_json(dir / "manifest.json").value("hash", "") != stage.hash) {
        throw Error(Errc::StaleArtifact, fmt::format("{} manifest hash does not match its directory", stage.name));
    }
    return dir;
}

json span_json(const Span& s) { return json::array({s.start_ms, s.end_ms}); }

// ---- stage keys ---------------------------------------------------------

Stage ingest_stage(const RunConfig& cfg) {
    json symbols = json::object();
    for (const auto& [name, path] : cfg.symbols) symbols[name] = sha256_file(resolve(cfg, path));
    return make_stage("ingest", {{"symbols", symbols},
                                 {"source_interval", std::string(to_string(cfg.source_interval))},
                                 {"interval", std::string(to_string(cfg.interval))}});
}

Stage pairs_stage(const RunConfig& cfg) {
    return make_stage("pairs", {{"ingest", ingest_stage(cfg).hash},
                                {"formation", span_json(cfg.formation)},
                                {"min_volume_quantile", cfg.min_volume_quantile},
                                {"window", cfg.pair_window},
                                {"step", cfg.pair_step},
                                {"significance", cfg.significance}});
}

Stage grid_stage(const RunConfig& cfg) {
    return make_stage("gridsearch", {{"pairs", pairs_stage(cfg).hash},
                                     {"open", cfg.grid.open_thresholds},
                                     {"close", cfg.grid.close_thresholds},
                                     {"windows", cfg.grid.windows},
                                     {"fee", cfg.grid_fee},
                                     {"initial_cash", cfg.initial_cash}});
}

json params_key(const RunConfig& cfg) {
    if (cfg.manual_thresholds) {
        return {{"pairs", pairs_stage(cfg).hash},
                {"open", cfg.manual_thresholds->open},
                {"close", cfg.manual_thresholds->close},
                {"window", *cfg.manual_window}};
    }
    return {{"gridsearch", grid_stage(cfg).hash}};
}

json env_key(const RunConfig& cfg) {
    return {{"mode", std::string(to_string(cfg.mode))},
            {"reward", std::string(to_string(cfg.reward))},
            {"weights", {cfg.weights.portfolio, cfg.weights.action, cfg.weights.transaction}},
            {"gamma", cfg.env_gamma},
            {"episode_length", cfg.episode_length},
            {"random_start", cfg.random_start},
            {"flat_band", cfg.flat_band}};
}

json agent_key(const TrainConfig& a) {
    return {{"learning_rate", a.learning_rate}, {"n_steps", a.n_steps},         {"gamma", a.gamma},
            {"entropy_coef", a.entropy_coef},   {"value_coef", a.value_coef},   {"total_steps", a.total_steps},
            {"hidden", a.hidden},               {"max_grad_norm", a.max_grad_norm}};
}

Stage backtest_stage(const RunConfig& cfg) {
    json key{{"params", params_key(cfg)},  {"test", span_json(cfg.test)},
             {"fee", cfg.fee},             {"initial_cash", cfg.initial_cash},
             {"risk_free_rate", cfg.risk_free_rate}, {"policy", cfg.policy}};
    if (cfg.policy == "random") key["seed"] = cfg.seed;
    return make_stage("backtest", key);
}

Stage train_stage(const RunConfig& cfg) {
    return make_stage("train", {{"params", params_key(cfg)},
                                {"env", env_key(cfg)},
                                {"agent", agent_key(cfg.agent)},
                                {"fee", cfg.fee},
                                {"initial_cash", cfg.initial_cash},
                                {"seed", cfg.seed}});
}

Stage eval_stage(const RunConfig& cfg) {
    json key{{"params", params_key(cfg)},
             {"test", span_json(cfg.test)},
             {"env", env_key(cfg)},
             {"fee", cfg.fee},
             {"initial_cash", cfg.initial_cash},
             {"risk_free_rate", cfg.risk_free_rate},
             {"seed", cfg.seed},
             {"episodes", cfg.eval_episodes},
             {"agent", cfg.eval_agent}};
    if (cfg.eval_agent == "checkpoint") key["train"] = train_stage(cfg).hash;
    return make_stage("eval", key);
}

// ---- data ---------------------------------------------------------------

std::pair<std::string, std::string> selected_pair(const RunConfig& cfg) {
    const auto sel = read_json(require_stage(cfg, pairs_stage(cfg)) / "selected.json");
    return {sel.at("symbol_i").get<std::string>(), sel.at("symbol_j").get<std::string>()};
}

std::vector<Candle> load_symbol(const fs::path& ingest_dir, const std::string& symbol, Interval interval, const Span& span) {
    const auto candles = parse_klines(ingest_dir / (symbol + ".csv"), interval);
    std::vector<Candle> out;
    for (const auto& c : candles) {
        if (c.open_time >= span.start_ms && c.open_time < span.end_ms) out.push_back(c);
    }
    return out;
}

// Each period is aligned (and volume-filtered) from its own candles only.
AlignedPairSeries period_series(const RunConfig& cfg, const std::string& si, const std::string& sj, const Span& span) {
    const auto dir = require_stage(cfg, ingest_stage(cfg));
    const auto a = load_symbol(dir, si, cfg.interval, span);
    const auto b = load_symbol(dir, sj, cfg.interval, span);
    return align_pair(a, b, cfg.min_volume_quantile, si, sj);
}

// Test-period series preceded by the last window-1 formation rows so the first
// decision falls on the first test row.
AlignedPairSeries test_series_with_warmup(const RunConfig& cfg, std::size_t window) {
    const auto [si, sj] = selected_pair(cfg);
    const auto formation = period_series(cfg, si, sj, cfg.formation);
    const auto test = period_series(cfg, si, sj, cfg.test);
    if (formation.size() + 1 < window) {
        throw Error(Errc::SeriesTooShort, fmt::format("formation period has {} rows; warm-up needs {}", formation.size(), window - 1));
    }
    auto out = formation.slice(formation.size() - (window - 1), window - 1);
    out.timestamps.insert(out.timestamps.end(), test.timestamps.begin(), test.timestamps.end());
    out.prices_i.insert(out.prices_i.end(), test.prices_i.begin(), test.prices_i.end());
    out.prices_j.insert(out.prices_j.end(), test.prices_j.begin(), test.prices_j.end());
    return out;
}

struct TradingParams {
    Thresholds thresholds;
    std::size_t window = 0;
};

TradingParams trading_params(const RunConfig& cfg) {
    if (cfg.manual_thresholds) return {*cfg.manual_thresholds, *cfg.manual_window};
    const auto best = read_json(require_stage(cfg, grid_stage(cfg)) / "best.json");
    return {Thresholds{best.at("open").get<double>(), best.at("close").get<double>()},
            best.at("window").get<std::size_t>()};
}

EnvConfig env_config(const RunConfig& cfg, const TradingParams& params) {
    EnvConfig env;
    env.mode = cfg.mode;
    env.thresholds = params.thresholds;
    env.window = params.window;
    env.fee = FeeModel{cfg.fee};
    env.gamma = cfg.env_gamma;
    env.weights = cfg.weights;
    env.variant = cfg.reward;
    env.initial_cash = cfg.initial_cash;
    env.seed = cfg.seed;
    env.episode_length = cfg.episode_length;
    env.random_start = cfg.random_start;
    env.flat_band = cfg.flat_band;
    return env;
}

std::unique_ptr<Policy> make_policy(const std::string& name, std::uint64_t seed, ActionSet actions) {
    if (name == "gatev") return std::make_unique<GatevPolicy>();
    if (name == "flat") return std::make_unique<FlatPolicy>();
    if (name == "random") return std::make_unique<RandomPolicy>(seed, actions);
    throw Error(Errc::ConfigError, fmt::format("unknown policy '{}'", name));
}

void write_run_outputs(const fs::path& dir, const json& run, const MetricsReport& report, const EquityCurve& equity,
                       const std::vector<TradeRecord>& trades, const std::vector<double>& episode_returns) {
    json doc;
    doc["run"] = run;
    doc["metrics"] = to_json(report);
    if (!episode_returns.empty()) doc["episode_returns"] = episode_returns;
    write_text(dir / "metrics.json", doc.dump(2) + "\n");
    write_text(dir / "report.txt", format_report_table(report, run.value("strategy", "")));
    std::ostringstream eq, tr;
    write_equity_csv(eq, equity);
    write_trade_blotter(tr, trades);
    write_text(dir / "equity.csv", eq.str());
    write_text(dir / "trades.csv", tr.str());
}

json run_block(const RunConfig& cfg, const std::string& command, const std::string& strategy,
               const AlignedPairSeries& series, const TradingParams& params, const std::string& hash) {
    return {{"command", command},
            {"strategy", strategy},
            {"pair", series.pair_name()},
            {"fee", cfg.fee},
            {"open", params.thresholds.open},
            {"close", params.thresholds.close},
            {"window", params.window},
            {"seed", cfg.seed},
            {"config_hash", hash}};
}

}  // namespace

// ---- commands -----------------------------------------------------------

CommandOutput cmd_ingest(const RunConfig& cfg) {
    const auto stage = ingest_stage(cfg);
    std::map<std::string, std::vector<Candle>> loaded;
    for (const auto& [name, path] : cfg.symbols) {
        if (name.empty() || name.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-") != std::string::npos) {
            throw Error(Errc::ConfigError, fmt::format("symbol name '{}' must be alphanumeric", name));
        }
        auto candles = parse_klines(resolve(cfg, path), cfg.source_interval);
        if (cfg.interval != cfg.source_interval) {
            candles = resample(candles, interval_minutes(cfg.interval) / interval_minutes(cfg.source_interval));
        }
        loaded[name] = std::move(candles);
    }
    const auto dir = open_stage(cfg, stage);
    json summary = json::object();
    for (const auto& [name, candles] : loaded) {
        write_klines(dir / (name + ".csv"), candles);
        summary[name] = {{"rows", candles.size()},
                         {"first", candles.empty() ? 0 : candles.front().open_time},
                         {"last", candles.empty() ? 0 : candles.back().open_time}};
    }
    write_text(dir / "symbols.json", summary.dump(2) + "\n");
    return {dir, stage.hash};
}

CommandOutput cmd_pairs(const RunConfig& cfg) {
    const auto stage = pairs_stage(cfg);
    require_stage(cfg, ingest_stage(cfg));
    WindowOptions options;
    options.window = cfg.pair_window;
    options.step = cfg.pair_step;
    options.adf.significance = cfg.significance;
    options.threads = cfg.threads;

    std::map<std::string, PairScore> scores;
    std::map<std::string, std::pair<std::string, std::string>> members;
    std::map<std::string, std::string> failures;
    std::vector<std::string> names;
    for (const auto& [name, path] : cfg.symbols) names.push_back(name);
    for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = a + 1; b < names.size(); ++b) {
            const auto series = period_series(cfg, names[a], names[b], cfg.formation);
            try {
                scores[series.pair_name()] = windowed_pair_scores(series, options);
                members[series.pair_name()] = {names[a], names[b]};
            } catch (const Error& e) {
                failures[series.pair_name()] = std::string(to_string(e.code()));
            }
        }
    }
    if (scores.empty()) throw Error(Errc::NoValidWindow, "no pair could be scored over the formation period");
    const auto ranking = rank_pairs(scores);

    const auto dir = open_stage(cfg, stage);
    const auto iv = to_string(cfg.interval);
    std::string csv = "pair,interval,coint_score,corr_score,windows_evaluated,status\n";
    for (const auto& name : ranking) {
        const auto& s = scores.at(name);
        csv += fmt::format("{},{},{},{},{},ok\n", name, iv, s.coint_score, s.corr_score, s.windows_evaluated);
    }
    for (const auto& [name, code] : failures) csv += fmt::format("{},{},,,0,{}\n", name, iv, code);
    write_text(dir / "pairs.csv", csv);
    const auto& best = ranking.front();
    json selected{{"pair", best},
                  {"symbol_i", members.at(best).first},
                  {"symbol_j", members.at(best).second},
                  {"coint_score", scores.at(best).coint_score},
                  {"corr_score", scores.at(best).corr_score}};
    write_text(dir / "selected.json", selected.dump(2) + "\n");
    return {dir, stage.hash};
}

CommandOutput cmd_gridsearch(const RunConfig& cfg) {
    const auto stage = grid_stage(cfg);
    const auto [si, sj] = selected_pair(cfg);
    const auto series = period_series(cfg, si, sj, cfg.formation);
    BacktestConfig bt;
    bt.fee = FeeModel{cfg.grid_fee};
    bt.initial_cash = cfg.initial_cash;
    const auto result = grid_search(series, cfg.grid, bt, cfg.threads);
    const auto& best = select_best(result.ranked);

    const auto dir = open_stage(cfg, stage);
    std::ostringstream csv;
    write_grid_csv(csv, result);
    write_text(dir / "grid.csv", csv.str());
    json j{{"pair", series.pair_name()}, {"open", best.open},     {"close", best.close},
           {"window", best.window},      {"rtot", best.rtot},     {"trades", best.trades}};
    write_text(dir / "best.json", j.dump(2) + "\n");
    return {dir, stage.hash};
}

CommandOutput cmd_backtest(const RunConfig& cfg) {
    const auto stage = backtest_stage(cfg);
    const auto params = trading_params(cfg);
    const auto series = test_series_with_warmup(cfg, params.window);
    const auto trace = compute_spread_trace(series, params.window, params.thresholds);
    auto policy = make_policy(cfg.policy, cfg.seed, ActionSet::Discrete);
    BacktestConfig bt;
    bt.fee = FeeModel{cfg.fee};
    bt.initial_cash = cfg.initial_cash;
    const auto result = run_backtest(series, trace, params.thresholds, *policy, bt);
    const auto report = compute_report(result.equity, result.trades, result.position_fractions,
                                       MetricsConfig{cfg.risk_free_rate});

    const auto dir = open_stage(cfg, stage);
    auto run = run_block(cfg, "backtest", cfg.policy, series, params, stage.hash);
    run["rtot"] = rtot(cfg.initial_cash, std::max(result.final_value(), 0.0), static_cast<double>(result.steps()));
    write_run_outputs(dir, run, report, result.equity, result.trades, {});
    std::ostringstream actions, spread;
    write_action_log(actions, result.actions);
    write_spread_trace(spread, trace);
    write_text(dir / "actions.csv", actions.str());
    write_text(dir / "spread.csv", spread.str());
    return {dir, stage.hash};
}

CommandOutput cmd_train(const RunConfig& cfg) {
    const auto stage = train_stage(cfg);
    const auto params = trading_params(cfg);
    const auto [si, sj] = selected_pair(cfg);
    auto series = std::make_shared<const AlignedPairSeries>(period_series(cfg, si, sj, cfg.formation));
    TradingEnv env(series, env_config(cfg, params));
    TrainLog log;
    const auto agent = train(env, cfg.agent, &log);

    const auto dir = open_stage(cfg, stage);
    json sidecar{{"config_hash", stage.hash}, {"key", stage.key}, {"seed", cfg.seed}};
    save_checkpoint(dir / "agent.bin", agent, sidecar);
    std::string csv = "update,loss\n";
    for (std::size_t k = 0; k < log.losses.size(); ++k) csv += fmt::format("{},{}\n", k, log.losses[k]);
    write_text(dir / "train_log.csv", csv);
    std::string episodes = "episode,return\n";
    for (std::size_t k = 0; k < log.episode_returns.size(); ++k) {
        episodes += fmt::format("{},{}\n", k, log.episode_returns[k]);
    }
    write_text(dir / "episodes.csv", episodes);
    return {dir, stage.hash};
}

CommandOutput cmd_eval(const RunConfig& cfg) {
    const auto stage = eval_stage(cfg);
    const auto params = trading_params(cfg);
    auto series = std::make_shared<const AlignedPairSeries>(test_series_with_warmup(cfg, params.window));
    auto env_cfg = env_config(cfg, params);
    env_cfg.episode_length = 0;
    env_cfg.random_start = false;
    TradingEnv env(series, env_cfg);

    EvaluationResult result;
    std::string strategy;
    if (cfg.eval_agent == "checkpoint") {
        const auto agent = load_checkpoint(require_stage(cfg, train_stage(cfg)) / "agent.bin");
        strategy = fmt::format("a2c-{}", to_string(cfg.mode));
        result = evaluate(agent, env, cfg.eval_episodes, ActMode::Deterministic, cfg.seed, MetricsConfig{cfg.risk_free_rate});
    } else {
        auto policy = make_policy(cfg.eval_agent, cfg.seed,
                                  cfg.mode == EnvMode::RL1 ? ActionSet::Discrete : ActionSet::Continuous);
        PolicyAgent agent(*policy, cfg.mode);
        strategy = fmt::format("{}-{}", cfg.eval_agent, to_string(cfg.mode));
        result = evaluate(agent, env, cfg.eval_episodes, cfg.seed, MetricsConfig{cfg.risk_free_rate});
    }

    const auto dir = open_stage(cfg, stage);
    auto run = run_block(cfg, "eval", strategy, *series, params, stage.hash);
    run["mode"] = std::string(to_string(cfg.mode));
    run["reward"] = std::string(to_string(cfg.reward));
    write_run_outputs(dir, run, result.reports.back(), env.equity(), env.portfolio().trades(), result.returns);
    std::ostringstream trace;
    write_episode_trace(trace, env.episode_trace());
    write_text(dir / "episode_trace.csv", trace.str());
    return {dir, stage.hash};
}

CommandOutput cmd_report(const RunConfig& cfg, const std::vector<fs::path>& runs, std::ostream& out) {
    std::vector<fs::path> dirs = runs;
    if (dirs.empty() && fs::exists(cfg.out)) {
        for (const auto& entry : fs::directory_iterator(cfg.out)) {
            const auto name = entry.path().filename().string();
            if (entry.is_directory() && (name.starts_with("backtest-") || name.starts_with("eval-")) &&
                fs::exists(entry.path() / "metrics.json")) {
                dirs.push_back(entry.path());
            }
        }
    }
    if (dirs.empty()) throw Error(Errc::StaleArtifact, "no backtest or eval artifacts to report on");
    std::sort(dirs.begin(), dirs.end());

    struct Row {
        json run;
        MetricsReport metrics;
    };
    std::vector<Row> rows;
    json inputs = json::array();
    for (const auto& d : dirs) {
        const auto doc = read_json(d / "metrics.json");
        rows.push_back({doc.at("run"), report_from_json(doc.at("metrics"))});
        inputs.push_back(doc.at("run").at("config_hash"));
    }
    const auto stage = make_stage("report", {{"runs", inputs}});

    const auto num = [](double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string(v > 0 ? "inf" : "nan"); };
    std::string csv =
        "strategy,mode,reward,pair,fee,open,close,window,cumulative_return_pct,cagr_pct,sharpe,total_actions,"
        "won_actions,lost_actions,win_loss_ratio,time_in_market_pct,volatility_ann_pct,skew,kurtosis,run\n";
    std::string table = fmt::format("{:<20}{:>8}{:>9}{:>12}{:>16}{:>9}{:>8}{:>8}{:>8}{:>10}\n", "strategy", "mode",
                                    "fee %", "return %", "CAGR %", "sharpe", "trades", "won", "lost", "in mkt %");
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        const double fee = r.run.at("fee").get<double>();
        const std::string mode = r.run.value("mode", "-");
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                           r.run.at("strategy").get<std::string>(), mode, r.run.value("reward", "-"),
                           r.run.at("pair").get<std::string>(), fee, r.run.at("open").get<double>(),
                           r.run.at("close").get<double>(), r.run.at("window").get<std::size_t>(),
                           num(m.cumulative_return), num(m.cagr), m.sharpe ? num(*m.sharpe) : "", m.trades.total,
                           m.trades.won, m.trades.lost, num(m.trades.win_loss_ratio), num(m.time_in_market),
                           num(m.risk.volatility_ann), num(m.risk.skew), num(m.risk.kurtosis),
                           r.run.at("config_hash").get<std::string>().substr(0, 16));
        table += fmt::format("{:<20}{:>8}{:>9.3f}{:>12.4f}{:>16.4g}{:>9}{:>8}{:>8}{:>8}{:>10.2f}\n",
                             r.run.at("strategy").get<std::string>(), mode, fee * 100.0, m.cumulative_return, m.cagr,
                             m.sharpe ? fmt::format("{:.2f}", *m.sharpe) : "n/a", m.trades.total, m.trades.won,
                             m.trades.lost, m.time_in_market);
    }
    const auto dir = open_stage(cfg, stage);
    write_text(dir / "comparison.csv", csv);
    write_text(dir / "comparison.txt", table);
    out << table;
    return {dir, stage.hash};
}

void cmd_serve_env(const RunConfig& cfg, std::istream& in, std::ostream& out) {
    const auto params = trading_params(cfg);
    auto series = std::make_shared<const AlignedPairSeries>(test_series_with_warmup(cfg, params.window));
    TradingEnv env(series, env_config(cfg, params));
    serve_external(env, in, out);
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pair-trading research pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    double fee = 0.0;
    std::string out_dir, interval, mode, reward;
    std::vector<std::string> runs;
    std::map<std::string, CLI::Option*> flags;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML run configuration")->required();
        flags[sub->get_name() + "seed"] = sub->add_option("--seed", seed, "global seed");
        flags[sub->get_name() + "fee"] = sub->add_option("--fee", fee, "fee rate per asset per trade");
        flags[sub->get_name() + "out"] = sub->add_option("--out", out_dir, "artifact root directory");
        flags[sub->get_name() + "interval"] =
            sub->add_option("--interval", interval, "bar interval")->check(CLI::IsMember({"1m", "3m", "5m"}));
        flags[sub->get_name() + "mode"] = sub->add_option("--mode", mode, "environment")->check(CLI::IsMember({"rl1", "rl2"}));
        flags[sub->get_name() + "reward"] =
            sub->add_option("--reward", reward, "reward variant")->check(CLI::IsMember({"shaped", "plain"}));
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"ingest", "parse, validate and resample kline files"},
        {"pairs", "rank candidate pairs over the formation period"},
        {"gridsearch", "tune open/close thresholds and window"},
        {"backtest", "run the rule policy over the test period"},
        {"train", "train the actor-critic agent on the formation period"},
        {"eval", "evaluate an agent over the test period"},
        {"report", "merge run metrics into a comparison table"},
        {"serve-env", "serve the environment over stdin/stdout"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        if (name == "report") sub->add_option("runs", runs, "run directories (default: all under --out)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    const auto* sub = app.get_subcommands().front();
    const auto name = sub->get_name();
    const auto given = [&](const std::string& flag) { return flags.at(name + flag)->count() > 0; };

    try {
        auto cfg = load_config(config_path);
        Overrides o;
        if (given("seed")) o.seed = seed;
        if (given("fee")) o.fee = fee;
        if (given("out")) o.out = out_dir;
        if (given("interval")) o.interval = interval;
        if (given("mode")) o.mode = mode;
        if (given("reward")) o.reward = reward;
        apply_overrides(cfg, o);

        CommandOutput result;
        if (name == "ingest") result = cmd_ingest(cfg);
        else if (name == "pairs") result = cmd_pairs(cfg);
        else if (name == "gridsearch") result = cmd_gridsearch(cfg);
        else if (name == "backtest") result = cmd_backtest(cfg);
        else if (name == "train") result = cmd_train(cfg);
        else if (name == "eval") result = cmd_eval(cfg);
        else if (name == "report") {
            std::vector<fs::path> dirs(runs.begin(), runs.end());
            result = cmd_report(cfg, dirs, out);
        } else {
            cmd_serve_env(cfg, in, out);
            return 0;
        }
        out << result.dir.string() << '\n';
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.category()) {
            case ErrorCategory::Config: return 2;
            case ErrorCategory::Data: return 3;
            case ErrorCategory::Numeric: return 4;
        }
        return 3;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const json::exception& e) {
        err << "error: malformed artifact: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace pairtrade
