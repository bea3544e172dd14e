// acceptance_main.cpp
// Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pairtrade/actor_critic.hpp"
#include "pairtrade/econometrics.hpp"
#include "pairtrade/errors.hpp"
#include "pairtrade/grid_tuner.hpp"
#include "pairtrade/metrics.hpp"
#include "pairtrade/orchestrator.hpp"
#include "support/agent_fixtures.hpp"
#include "support/fixtures.hpp"
#include "support/pipeline_fixture.hpp"
#include "support/reference_ledger.hpp"

namespace pairtrade::acceptance {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    // Records a failed sub-check; the first few are reported.
    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 5) failures.push_back(what);
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- 1 -------------------------------------------------------------------

Outcome econometric_oracle() {
    Outcome o;
    const auto start = Clock::now();
    const auto doc = json::parse(testing::slurp(testing::data_dir() / "econometrics" / "expected.json"));
    const auto close = [&](double got, double ref, const std::string& what) {
        o.check(std::abs(got - ref) <= 1e-6 * std::max(1.0, std::abs(ref)), fmt::format("{}: {} vs {}", what, got, ref));
    };
    std::size_t decisions = 0, agreed = 0;
    for (const auto& f : doc["fixtures"]) {
        const std::string name = f["name"];
        const auto d = testing::read_xy(testing::data_dir() / "econometrics" / (name + ".csv"));
        close(pearson(d.x, d.y), f["pearson"], name + " pearson");
        const auto fit = ols(d.y, d.x);
        close(fit.alpha, f["alpha"], name + " alpha");
        close(fit.beta, f["beta"], name + " beta");
        close(fit.rss, f["rss"], name + " rss");
        AdfOptions opt;
        opt.lags = f["lags"].get<std::size_t>();
        const auto adf = adf_test(d.y, opt);
        close(adf.t_stat, f["adf_y"]["t_stat"], name + " adf t");
        close(adf.gamma_hat, f["adf_y"]["gamma"], name + " adf gamma");
        const auto eg = engle_granger(d.y, d.x, opt);
        close(eg.adf.t_stat, f["engle_granger"]["t_stat"], name + " eg t");
        close(eg.adf.gamma_hat, f["engle_granger"]["gamma"], name + " eg gamma");
        decisions += 2;
        agreed += (adf.stationary == f["adf_y"]["stationary"].get<bool>()) +
                  (eg.cointegrated == f["engle_granger"]["stationary"].get<bool>());
    }
    const double secs = seconds_since(start);
    o.check(doc["fixtures"].size() == 25, "expected 25 fixtures");
    o.check(agreed == decisions, fmt::format("decision agreement {}/{}", agreed, decisions));
    o.check(secs < 10.0, fmt::format("runtime {:.2f}s", secs));
    o.detail = fmt::format("{} fixtures, decisions {}/{}, {:.2f}s", doc["fixtures"].size(), agreed, decisions, secs);
    return o;
}

// ---- 2 -------------------------------------------------------------------

Outcome cointegration_power() {
    Outcome o;
    const auto start = Clock::now();
    constexpr int kTrials = 200;
    constexpr std::size_t n = 1000;
    int detected = 0, false_positive = 0;
    for (int trial = 0; trial < kTrials; ++trial) {
        std::mt19937_64 rng(5000 + trial);
        std::normal_distribution<double> normal(0.0, 1.0);
        const auto x = testing::random_walk(rng, n);
        std::vector<double> y(n);
        double spread = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            spread = 0.8 * spread + normal(rng);
            y[t] = 1.5 * x[t] + 10.0 + spread;
        }
        detected += engle_granger(y, x).cointegrated;
        const auto a = testing::random_walk(rng, n);
        const auto b = testing::random_walk(rng, n);
        false_positive += engle_granger(a, b).cointegrated;
    }
    const double power = 100.0 * detected / kTrials;
    const double size = 100.0 * false_positive / kTrials;
    const double secs = seconds_since(start);
    o.check(power >= 95.0, fmt::format("detection {:.1f}%", power));
    o.check(size <= 10.0, fmt::format("false positives {:.1f}%", size));
    o.check(secs < 60.0, fmt::format("runtime {:.2f}s", secs));
    o.detail = fmt::format("detection {:.1f}%, false positives {:.1f}%, {:.2f}s", power, size, secs);
    return o;
}

// ---- 3 -------------------------------------------------------------------

// Five-way partition written out directly from the threshold inequalities.
Zone reference_zone(double z, double ot, double ct) {
    if (z >= ot) return Zone::ShortZone;
    if (z >= ct) return Zone::NeutralShortZone;
    if (z > -ct) return Zone::CloseZone;
    if (z > -ot) return Zone::NeutralLongZone;
    return Zone::LongZone;
}

Outcome zone_fidelity() {
    Outcome o;
    std::vector<Thresholds> pairs{{1.8, 0.4}};
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> ct(0.05, 2.0), gap(0.05, 3.0);
    for (int k = 0; k < 20; ++k) {
        const double c = ct(rng);
        pairs.push_back({c + gap(rng), c});
    }
    std::size_t checked = 0;
    for (const auto& t : pairs) {
        std::vector<double> zs;
        for (int k = 0; k < 10000; ++k) zs.push_back(-6.0 + 12.0 * k / 9999.0);
        for (double b : {t.open, t.close, -t.open, -t.close}) {
            zs.push_back(b);
            zs.push_back(std::nextafter(b, -INFINITY));
            zs.push_back(std::nextafter(b, INFINITY));
        }
        for (double z : zs) {
            ++checked;
            o.check(classify_zone(z, t) == reference_zone(z, t.open, t.close),
                    fmt::format("z={} OT={} CT={}", z, t.open, t.close));
        }
    }
    o.detail = fmt::format("{} threshold pairs, {} classifications", pairs.size(), checked);
    return o;
}

// ---- 4 -------------------------------------------------------------------

Outcome accounting_conservation() {
    Outcome o;
    constexpr double kCash = 10000.0;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> target(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 4);
    std::normal_distribution<double> shock(0.0, 0.01);
    double worst_gap = 0.0;
    std::size_t fee_runs = 0;
    for (int seq = 0; seq < 1000; ++seq) {
        for (double fee : {0.0, 0.0002}) {
            Portfolio p(kCash, FeeModel{fee});
            testing::ReferenceLedger ref(kCash, fee);
            double pi = 70.0 + 20.0 * target(rng), pj = 90.0 + 10.0 * target(rng);
            double sum_i = 0.0, sum_j = 0.0;
            for (int t = 0; t < 50; ++t) {
                pi *= std::exp(shock(rng));
                pj *= std::exp(shock(rng));
                const int kind = pick(rng);
                double tgt = kind == 0 ? 0.0 : kind == 1 ? 1.0 : kind == 2 ? -1.0 : target(rng);
                if (kind == 4) tgt = p.position_fraction(pi, pj);
                const auto r = p.execute(tgt, pi, pj, t);
                ref.apply(tgt, pi, pj);
                sum_i += r.notional_i;
                sum_j += r.notional_j;
            }
            if (fee == 0.0) {
                const double gap = std::abs(p.mark_to_market(pi, pj) - ref.value(pi, pj));
                worst_gap = std::max(worst_gap, gap);
                o.check(gap < 1e-6 * kCash, fmt::format("sequence {} value gap {}", seq, gap));
            } else {
                ++fee_runs;
                o.check(p.total_fees() == 0.0002 * sum_i + 0.0002 * sum_j,
                        fmt::format("sequence {} fees {} vs {}", seq, p.total_fees(), 0.0002 * sum_i + 0.0002 * sum_j));
                o.check(std::abs(p.total_fees() - ref.fees()) < 1e-9,
                        fmt::format("sequence {} fees differ from replay", seq));
            }
        }
    }
    o.detail = fmt::format("1000 sequences, max |V - replay| {:.3g}, {} fee runs exact", worst_gap, fee_runs);
    return o;
}

// ---- 5 -------------------------------------------------------------------

Outcome adjust_semantics() {
    Outcome o;
    Portfolio p(1000.0, FeeModel{0.0});
    p.execute(0.7, 100.0, 100.0, 0);
    o.check(p.position_fraction(100.0, 100.0) == 0.7, "opening at 0.7");
    const auto r = p.execute(0.8, 100.0, 100.0, 60000);
    o.check(r.executed_delta == 0.1, fmt::format("delta {}", r.executed_delta));
    o.check(r.notional_i + r.notional_j == 100.0, fmt::format("traded {}", r.notional_i + r.notional_j));
    o.check(!r.closed && p.trades().empty(), "adjust produced a trade-close record");
    o.check(p.position_fraction(100.0, 100.0) == 0.8, "position after adjust");
    o.detail = fmt::format("delta {}, traded notional {}", r.executed_delta, r.notional_i + r.notional_j);
    return o;
}

// ---- 6 -------------------------------------------------------------------

Outcome reward_decomposition() {
    Outcome o;
    const auto series = std::make_shared<const AlignedPairSeries>(testing::ou_pair(1500, 606));
    std::mt19937_64 rng(66);
    std::size_t steps = 0, plain_idle = 0;
    int episodes = 0;
    for (EnvMode mode : {EnvMode::RL1, EnvMode::RL2}) {
        for (RewardVariant variant : {RewardVariant::Shaped, RewardVariant::Plain}) {
            EnvConfig cfg;
            cfg.mode = mode;
            cfg.variant = variant;
            cfg.window = 60;
            cfg.thresholds = {1.5, 0.5};
            cfg.weights = {1.0, 0.3, 0.2};
            cfg.random_start = true;
            cfg.episode_length = 150;
            TradingEnv env(series, cfg);
            for (int e = 0; e < 25; ++e, ++episodes) {
                env.reset(static_cast<std::uint64_t>(e));
                while (!env.done()) {
                    EnvAction action;
                    if (mode == EnvMode::RL1) {
                        action = static_cast<DiscreteAction>(std::uniform_int_distribution<int>(0, 2)(rng));
                    } else {
                        action = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
                    }
                    const auto r = env.step(action);
                    ++steps;
                    const auto& b = r.breakdown;
                    const auto& w = cfg.weights;
                    if (variant == RewardVariant::Shaped) {
                        const double sum = w.portfolio * b.portfolio + w.action * b.action - w.transaction * b.transaction;
                        o.check(r.reward == sum, fmt::format("shaped step {}: {} vs {}", steps, r.reward, sum));
                    } else if (mode == EnvMode::RL1 && r.info.fees == 0.0) {
                        ++plain_idle;
                        o.check(r.reward == 0.0, fmt::format("plain RL1 idle step reward {}", r.reward));
                    }
                }
            }
        }
    }
    o.check(plain_reward_rl2(5.0, 0.5, 0.2) == 2.3, "plain RL2 formula case");
    o.check(episodes == 100, "episode count");
    o.detail = fmt::format("{} episodes, {} steps, {} idle plain RL1 steps, formula case 2.3", episodes, steps, plain_idle);
    return o;
}

// ---- 7 -------------------------------------------------------------------

Outcome sinusoid_fixture() {
    Outcome o;
    // z_t = sqrt(2) sin(2 pi t / 40). With OT 1.2 the short leg opens where
    // sin >= 1.2 / sqrt(2) first holds (t = 7 mod 40) and closes once z < 0.3
    // (t = 19); the long leg mirrors at 27 and 39.
    const std::size_t n = 600, w = 200;
    const auto s = testing::periodic_pair(n, 40, 25);
    const Thresholds th{1.2, 0.3};
    const auto trace = compute_spread_trace(s, w, th, FitMode::Refit);
    GatevPolicy policy;
    BacktestConfig cfg;
    cfg.fee.rate = 0.0;
    const auto r = run_backtest(s, trace, th, policy, cfg);
    const std::size_t expected = 2 * ((n - w) / 40);
    o.check(r.trades.size() == expected, fmt::format("{} trades, expected {}", r.trades.size(), expected));
    for (std::size_t k = 0; k < std::min(r.trades.size(), expected); ++k) {
        const bool is_short = k % 2 == 0;
        const std::int64_t base = static_cast<std::int64_t>(w) + 40 * static_cast<std::int64_t>(k / 2);
        o.check(r.trades[k].open_time == testing::kDay0 + 60000 * (base + (is_short ? 7 : 27)), fmt::format("open {}", k));
        o.check(r.trades[k].close_time == testing::kDay0 + 60000 * (base + (is_short ? 19 : 39)), fmt::format("close {}", k));
    }
    const double ret = cumulative_return(r.equity);
    o.check(ret > 0.0, fmt::format("cumulative return {}", ret));
    o.detail = fmt::format("{} trades at analytic times, cumulative return {:.4f}%", r.trades.size(), ret);
    return o;
}

// ---- 8 -------------------------------------------------------------------

Outcome grid_determinism() {
    Outcome o;
    const auto ou = testing::ou_pair(1500, 808);
    const GridSpec g{{1.5, 2.0, 2.5}, {0.2, 0.5, 1.0}, {100, 200}};
    const auto seq = grid_search(ou, g, BacktestConfig{}, 1);
    const auto par = grid_search(ou, g, BacktestConfig{}, 4);
    o.check(seq.ranked.size() == 18 && par.ranked.size() == 18, "3x3x2 grid size");
    for (std::size_t k = 0; k < std::min(seq.ranked.size(), par.ranked.size()); ++k) {
        const auto& a = seq.ranked[k];
        const auto& b = par.ranked[k];
        o.check(a.open == b.open && a.close == b.close && a.window == b.window &&
                    std::bit_cast<std::uint64_t>(a.rtot) == std::bit_cast<std::uint64_t>(b.rtot) && a.trades == b.trades,
                fmt::format("rank {} differs", k));
    }

    BacktestConfig zero_fee;
    zero_fee.fee.rate = 0.0;
    const auto planted = grid_search(testing::periodic_pair(1200, 40, 25), GridSpec{{1.3, 1.6, 2.0}, {0.2, 0.4, 1.0}, {200}},
                                     zero_fee, 2);
    const auto& best = select_best(planted.ranked);
    o.check(best.open == 1.3 && best.close == 0.2 && best.window == 200,
            fmt::format("planted optimum gave ({}, {}, {})", best.open, best.close, best.window));

    const auto peaked = testing::periodic_pair(6000, 100, 50, 4.0, 5);
    const auto table = grid_search(peaked, GridSpec{{1.9, 4.0}, {0.4, 2.0}, {900, 2000}}, BacktestConfig{}, 2);
    double trading = NAN, idle = NAN;
    for (const auto& p : table.ranked) {
        if (p.open == 1.9 && p.close == 0.4 && p.window == 900) trading = p.rtot;
        if (p.open == 4.0 && p.close == 2.0 && p.window == 2000) idle = p.rtot;
    }
    o.check(trading > idle, fmt::format("rtot(1.9, 0.4, 900) = {} vs rtot(4.0, 2.0, 2000) = {}", trading, idle));
    o.detail = fmt::format("18 points bitwise equal, planted optimum ({}, {}, {}), ordering {:.4g} > {:.4g}", best.open,
                           best.close, best.window, trading, idle);
    return o;
}

// ---- 9 -------------------------------------------------------------------

Outcome gradient_checks() {
    Outcome o;
    double worst = 0.0;
    int networks = 0;
    for (auto head : {ActionHead::Categorical, ActionHead::SquashedGaussian}) {
        for (std::uint64_t seed = 900; seed < 910; ++seed, ++networks) {
            const auto p = init_agent(head, {8, 8}, seed);
            const auto batch = testing::random_batch(head, 8, seed + 1);
            const double err = grad_check(p, batch, {0.01, 0.5});
            worst = std::max(worst, err);
            o.check(err < 1e-4, fmt::format("{} seed {} error {}", to_string(head), seed, err));
        }
    }
    double control = INFINITY;
    for (auto head : {ActionHead::Categorical, ActionHead::SquashedGaussian}) {
        const auto p = init_agent(head, {8, 8}, 950);
        const double err = grad_check(p, testing::random_batch(head, 8, 951), {0.01, 0.5}, testing::corrupted_gradient);
        control = std::min(control, err);
        o.check(err > 1e-2, fmt::format("{} corrupted control error {}", to_string(head), err));
    }
    o.detail = fmt::format("{} networks, max relative error {:.3g}, corrupted control {:.3g}", networks, worst, control);
    return o;
}

// ---- 10 ------------------------------------------------------------------

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

MeanVar mean_var(const std::vector<double>& v) {
    MeanVar m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

// One-sided Welch t-test that a's mean exceeds b's.
double welch_p(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ma = mean_var(a), mb = mean_var(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double se2 = ma.var / na + mb.var / nb;
    if (se2 == 0.0) return ma.mean > mb.mean ? 0.0 : 1.0;
    const double t = (ma.mean - mb.mean) / std::sqrt(se2);
    const double df = se2 * se2 / (std::pow(ma.var / na, 2) / (na - 1) + std::pow(mb.var / nb, 2) / (nb - 1));
    return boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
}

Outcome learning_smoke() {
    Outcome o;
    const auto start = Clock::now();
    const auto series = std::make_shared<const AlignedPairSeries>(testing::ou_pair(5000, 2024, 0.05, 0.5));
    EnvConfig cfg;
    cfg.mode = EnvMode::RL1;
    cfg.window = 60;
    cfg.thresholds = {1.5, 0.5};
    cfg.fee.rate = 0.0;
    cfg.weights = {1.0, 1.0, 0.1};  // high action weight
    cfg.random_start = true;
    cfg.episode_length = 200;
    TradingEnv env(series, cfg);
    TrainConfig tc;
    tc.seed = 7;
    tc.total_steps = 200000;
    tc.hidden = {64, 64};
    const auto params = train(env, tc);
    const auto agent = evaluate(params, env, 20, ActMode::Deterministic, 1000);
    RandomPolicy random(99, ActionSet::Discrete);
    PolicyAgent random_agent(random, EnvMode::RL1);
    const auto baseline = evaluate(random_agent, env, 20, 1000);
    const double p = welch_p(agent.returns, baseline.returns);
    const double secs = seconds_since(start);
    const double agent_mean = mean_var(agent.returns).mean;
    const double random_mean = mean_var(baseline.returns).mean;
    o.check(agent_mean > random_mean && p < 0.01, fmt::format("agent {:.3f} vs random {:.3f}, p = {:.3g}", agent_mean, random_mean, p));
    o.check(agent.agreement() >= 0.8, fmt::format("agreement {:.3f}", agent.agreement()));
    o.check(secs < 300.0, fmt::format("runtime {:.1f}s", secs));
    o.detail = fmt::format("agent {:.2f} vs random {:.2f}, p = {:.2g}, agreement {:.3f} over {} zone steps, {:.1f}s",
                           agent_mean, random_mean, p, agent.agreement(), agent.zone_steps, secs);
    return o;
}

// ---- 11 ------------------------------------------------------------------

Outcome metric_arithmetic() {
    Outcome o;
    std::vector<TradeRecord> blotter;
    for (int k = 0; k < 284; ++k) blotter.push_back(TradeRecord{.realized_pnl = 1.0 + k});
    for (int k = 0; k < 206; ++k) blotter.push_back(TradeRecord{.realized_pnl = -0.5 - k});
    const auto stats = trade_stats(blotter);
    const double ratio = std::round(stats.win_loss_ratio * 100.0) / 100.0;
    o.check(stats.won == 284 && stats.lost == 206 && ratio == 1.38, fmt::format("win/loss {}", stats.win_loss_ratio));

    EquityCurve doubling;
    doubling.timestamps = {0, static_cast<std::int64_t>(kMsPerYear)};
    doubling.values = {100.0, 200.0};
    o.check(cagr(doubling) == 100.0, fmt::format("CAGR {}", cagr(doubling)));

    const MetricsConfig rf{0.055};
    const double ipy = 525600.0;
    const std::vector<double> at_rf(50, per_interval_risk_free(rf.risk_free_rate, ipy));
    o.check(sharpe_from_returns(at_rf, ipy, rf) == 0.0, "Sharpe of zero excess returns");

    std::mt19937_64 rng(1111);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> skewed, mirrored;
    for (int k = 0; k < 1000; ++k) {
        skewed.push_back(expo(rng));
        mirrored.push_back(-skewed.back());
    }
    const double s = return_moments(skewed, 1.0).skew;
    const double sm = return_moments(mirrored, 1.0).skew;
    o.check(s > 1.0 && std::abs(s + sm) < 1e-12, fmt::format("skew {} vs mirrored {}", s, sm));

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> gaussian(1'000'000);
    for (auto& x : gaussian) x = normal(rng);
    const double kurt = return_moments(gaussian, 1.0).kurtosis;
    o.check(std::abs(kurt - 3.0) <= 0.05, fmt::format("kurtosis {}", kurt));
    o.detail = fmt::format("win/loss {:.2f}, CAGR {}, skew {:.3f}/{:.3f}, kurtosis {:.4f}", ratio, cagr(doubling), s, sm, kurt);
    return o;
}

// ---- 12 ------------------------------------------------------------------

Outcome end_to_end() {
    Outcome o;
    testing::TempDir tmp("acceptance");
    const auto data = testing::write_kline_set(tmp.path() / "data", 12, 13);
    const auto run = [&](const testing::KlineSet& k, const std::string& out, const std::vector<std::string>& commands) {
        const auto config =
            testing::write_config(tmp.path() / (out + ".toml"), testing::pipeline_config(k, tmp.path() / out));
        for (const auto& cmd : commands) {
            const auto r = testing::run_command({cmd, "--config", config.string()});
            o.check(r.code == 0, fmt::format("{} in {} exited {}: {}", cmd, out, r.code, r.err));
        }
    };
    run(data, "first", testing::pipeline_commands());
    run(data, "second", testing::pipeline_commands());
    const auto a = testing::tree_contents(tmp.path() / "first");
    const auto b = testing::tree_contents(tmp.path() / "second");
    o.check(!a.empty() && a == b, "rerun artifacts differ");

    // Sentinel: regenerate only the test day and re-run formation-side stages.
    const auto altered = testing::write_kline_set(tmp.path() / "altered", 12, 777);
    run(altered, "sentinel", {"ingest", "pairs", "gridsearch", "backtest"});
    std::size_t compared = 0;
    for (const auto& [stage, file] : std::vector<std::pair<std::string, std::string>>{
             {"pairs", "pairs.csv"}, {"pairs", "selected.json"}, {"gridsearch", "grid.csv"}, {"gridsearch", "best.json"}}) {
        const auto x = testing::stage_dir(tmp.path() / "first", stage);
        const auto y = testing::stage_dir(tmp.path() / "sentinel", stage);
        o.check(!x.empty() && !y.empty() && testing::slurp(x / file) == testing::slurp(y / file),
                fmt::format("{} changed with test-period data", file));
        ++compared;
    }
    const auto bt_a = testing::stage_dir(tmp.path() / "first", "backtest");
    const auto bt_b = testing::stage_dir(tmp.path() / "sentinel", "backtest");
    o.check(!bt_a.empty() && !bt_b.empty() && testing::slurp(bt_a / "equity.csv") != testing::slurp(bt_b / "equity.csv"),
            "test-period data did not reach the backtest");
    o.detail = fmt::format("{} artifacts byte-identical across reruns, {} formation artifacts unchanged by test data",
                           a.size(), compared);
    return o;
}

struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
};

}  // namespace
}  // namespace pairtrade::acceptance

int main() {
    using namespace pairtrade::acceptance;
    const std::vector<Criterion> criteria{
        {1, "econometric oracle equivalence", econometric_oracle},
        {2, "cointegration power and size", cointegration_power},
        {3, "zone and threshold fidelity", zone_fidelity},
        {4, "accounting conservation", accounting_conservation},
        {5, "adjust semantics", adjust_semantics},
        {6, "reward decomposition", reward_decomposition},
        {7, "rule strategy on the sinusoid fixture", sinusoid_fixture},
        {8, "grid search determinism and optimum recovery", grid_determinism},
        {9, "gradient checks", gradient_checks},
        {10, "learning smoke test", learning_smoke},
        {11, "metric arithmetic", metric_arithmetic},
        {12, "end-to-end determinism", end_to_end},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str());
        for (const auto& f : o.failures) std::printf("       %s\n", f.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
