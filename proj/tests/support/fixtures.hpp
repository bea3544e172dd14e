// fixtures.hpp
// Synthetic series and file helpers shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pairtrade/market_data.hpp"

namespace pairtrade::testing {

inline std::filesystem::path data_dir() { return PAIRTRADE_TEST_DATA; }

struct XY {
    std::vector<double> x;
    std::vector<double> y;
};

// Two-column CSV with a header row.
inline XY read_xy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing fixture " + path.string());
    XY out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        out.x.push_back(std::stod(line.substr(0, comma)));
        out.y.push_back(std::stod(line.substr(comma + 1)));
    }
    return out;
}

constexpr std::int64_t kDay0 = 1'700'006'400'000;  // 2023-11-15 00:00 UTC, minute aligned

// p_j = 100 + cos(2 pi t / pj_period)
// p_i = 2 p_j + 10 + amplitude * sin(2 pi t / period)^power
// Over any window holding whole cycles of both periods the OLS fit is exact
// (beta1 = 2) and the residual is the planted periodic term.
inline AlignedPairSeries periodic_pair(std::size_t n, double period, double pj_period, double amplitude = 4.0,
                                       int power = 1) {
    AlignedPairSeries s;
    s.symbol_i = "PI";
    s.symbol_j = "PJ";
    s.interval = Interval::M1;
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        const double pj = 100.0 + std::cos(2.0 * std::numbers::pi * td / pj_period);
        const double r = std::pow(std::sin(2.0 * std::numbers::pi * td / period), power);
        s.timestamps.push_back(kDay0 + static_cast<std::int64_t>(t) * 60'000);
        s.prices_j.push_back(pj);
        s.prices_i.push_back(2.0 * pj + 10.0 + amplitude * r);
    }
    return s;
}

// p_j a positive random walk; p_i = 1.5 p_j + 20 + OU(theta, sigma).
inline AlignedPairSeries ou_pair(std::size_t n, std::uint64_t seed, double theta = 0.05, double sigma = 0.5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    AlignedPairSeries s;
    s.symbol_i = "OI";
    s.symbol_j = "OJ";
    s.interval = Interval::M1;
    double pj = 100.0;
    double spread = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        pj = std::max(20.0, pj + 0.2 * normal(rng));
        spread = (1.0 - theta) * spread + sigma * normal(rng);
        s.timestamps.push_back(kDay0 + static_cast<std::int64_t>(t) * 60'000);
        s.prices_j.push_back(pj);
        s.prices_i.push_back(1.5 * pj + 20.0 + spread);
    }
    return s;
}

inline std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n, double start = 100.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    double v = start;
    for (auto& x : out) {
        v += normal(rng);
        x = v;
    }
    return out;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("pairtrade-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pairtrade::testing
