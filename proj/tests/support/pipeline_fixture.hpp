// pipeline_fixture.hpp
// Synthetic kline files and a TOML config for end-to-end pipeline runs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pairtrade/orchestrator.hpp"
#include "support/fixtures.hpp"

namespace pairtrade::testing {

// AAA is a random walk, BBB = 1.5 AAA + 20 + OU (cointegrated), CCC is an
// independent walk. Three days of 1m bars starting at kDay0: two formation
// days, one test day. Rows from the test day on are drawn from test_seed, so
// changing it alters the test period only.
struct KlineSet {
    std::filesystem::path aaa, bbb, ccc;
};

inline constexpr std::size_t kFormationRows = 2 * 1440;
inline constexpr std::size_t kPipelineRows = 3 * 1440;

inline KlineSet write_kline_set(const std::filesystem::path& dir, std::uint64_t seed, std::uint64_t test_seed) {
    std::filesystem::create_directories(dir);
    std::mt19937_64 formation_rng(seed), test_rng(test_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> volume(5.0, 50.0);
    double a = 200.0, c = 150.0, ou = 0.0;
    std::vector<double> pa, pb, pc, va, vb, vc;
    for (std::size_t t = 0; t < kPipelineRows; ++t) {
        auto& rng = t < kFormationRows ? formation_rng : test_rng;
        a = std::max(20.0, a + 0.2 * normal(rng));
        c = std::max(20.0, c + 0.2 * normal(rng));
        ou = 0.9 * ou + 0.3 * normal(rng);
        pa.push_back(a);
        pb.push_back(1.5 * a + 20.0 + ou);
        pc.push_back(c);
        va.push_back(volume(rng));
        vb.push_back(volume(rng));
        vc.push_back(volume(rng));
    }
    const auto write = [&](const std::string& name, const std::vector<double>& p, const std::vector<double>& v) {
        const auto path = dir / (name + ".csv");
        std::ofstream out(path, std::ios::binary);
        for (std::size_t t = 0; t < p.size(); ++t) {
            const double open = t == 0 ? p[t] : p[t - 1];
            const double hi = std::max(open, p[t]) + 0.01;
            const double lo = std::min(open, p[t]) - 0.01;
            out << fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f},{:.3f}\n", kDay0 + static_cast<std::int64_t>(t) * 60'000,
                               open, hi, lo, p[t], v[t]);
        }
        return path;
    };
    return {write("AAA", pa, va), write("BBB", pb, vb), write("CCC", pc, vc)};
}

struct PipelineOptions {
    std::string eval_agent = "checkpoint";
    std::string policy = "gatev";
    std::size_t total_steps = 3000;
    std::string extra_trading;  // appended to [trading]
};

// Dates: formation 2023-11-15 .. 2023-11-17, test 2023-11-17 .. 2023-11-18.
inline std::string pipeline_config(const KlineSet& k, const std::filesystem::path& out, const PipelineOptions& o = {}) {
    return fmt::format(R"([data]
symbols = {{ AAA = "{}", BBB = "{}", CCC = "{}" }}
interval = "1m"

[periods]
formation = ["2023-11-15", "2023-11-17"]
test = ["2023-11-17", "2023-11-18"]

[pairs]
window = 720
step = 720

[grid]
open = [1.5, 2.0]
close = [0.0, 0.5]
windows = [120, 240]
fee = 0.0

[trading]
fee = 0.0002
initial_cash = 10000.0
policy = "{}"
{}

[env]
mode = "rl1"
episode_length = 200
random_start = true

[agent]
hidden = [16, 16]
total_steps = {}
eval = "{}"

[run]
seed = 11
out = "{}"
)",
                       k.aaa.string(), k.bbb.string(), k.ccc.string(), o.policy, o.extra_trading, o.total_steps,
                       o.eval_agent, out.string());
}

inline std::filesystem::path write_config(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_command(std::vector<std::string> args) {
    args.insert(args.begin(), "pairtrade");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in;
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

// Directory printed on the last line of a successful command.
inline std::filesystem::path printed_dir(const CliResult& r) {
    auto text = r.out;
    while (!text.empty() && text.back() == '\n') text.pop_back();
    return text.substr(text.find_last_of('\n') == std::string::npos ? 0 : text.find_last_of('\n') + 1);
}

inline const std::vector<std::string>& pipeline_commands() {
    static const std::vector<std::string> commands{"ingest", "pairs", "gridsearch", "backtest", "train", "eval", "report"};
    return commands;
}

// Every file under root keyed by relative path.
inline std::vector<std::pair<std::string, std::string>> tree_contents(const std::filesystem::path& root) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files.emplace_back(std::filesystem::relative(entry.path(), root).string(), slurp(entry.path()));
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

inline std::filesystem::path stage_dir(const std::filesystem::path& out, const std::string& stage) {
    for (const auto& entry : std::filesystem::directory_iterator(out)) {
        if (entry.path().filename().string().starts_with(stage + "-")) return entry.path();
    }
    return {};
}

}  // namespace pairtrade::testing
