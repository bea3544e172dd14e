#include "pairtrade/grid_tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <optional>
#include <ostream>

#include "pairtrade/errors.hpp"
#include "pairtrade/parallel.hpp"

namespace pairtrade {

GridSpec GridSpec::defaults() {
    GridSpec spec;
    for (int k = 15; k <= 40; ++k) spec.open_thresholds.push_back(k / 10.0);
    spec.close_thresholds = {0.2, 0.3, 0.4, 0.5, 1.0, 2.0};
    spec.windows = {500, 700, 800, 900, 1000, 2000};
    return spec;
}

double rtot(double v_start, double v_end, double t) {
    if (!(v_start > 0.0)) throw Error(Errc::NonPositiveStart, fmt::format("start value {} is not positive", v_start));
    if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "period count must be positive");
    return (std::pow(v_end / v_start, 1.0 / t) - 1.0) * 100.0;
}

bool ranks_before(const GridPoint& a, const GridPoint& b) {
    if (a.rtot != b.rtot) return a.rtot > b.rtot;
    if (a.window != b.window) return a.window < b.window;
    if (a.open != b.open) return a.open > b.open;
    return a.close > b.close;
}

GridResult grid_search(const AlignedPairSeries& series, const GridSpec& spec, const BacktestConfig& config,
                       unsigned threads) {
    struct Job {
        double open;
        double close;
        std::size_t window;
    };
    std::vector<Job> jobs;
    for (auto w : spec.windows) {
        for (double ot : spec.open_thresholds) {
            for (double ct : spec.close_thresholds) {
                if (ot > ct && ct > 0.0) jobs.push_back({ot, ct, w});
            }
        }
    }
    if (jobs.empty()) throw Error(Errc::EmptyGrid, "grid has no combination with OT > CT");
    const auto max_window = *std::max_element(spec.windows.begin(), spec.windows.end());
    if (series.size() <= max_window) {
        throw Error(Errc::SeriesTooShort,
                    fmt::format("series of {} samples is not longer than window {}", series.size(), max_window));
    }

    // One spread trace per window, shared read-only by every point using it.
    std::vector<std::size_t> windows(spec.windows.begin(), spec.windows.end());
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    std::vector<std::optional<SpreadTrace>> traces(windows.size());
    std::vector<std::string> trace_errors(windows.size());
    parallel_for(windows.size(), threads, [&](std::size_t k) {
        try {
            traces[k] = compute_spread_trace(series, windows[k], Thresholds{});
        } catch (const Error& e) {
            trace_errors[k] = std::string(to_string(e.code()));
        }
    });
    const auto trace_index = [&](std::size_t w) {
        return static_cast<std::size_t>(std::lower_bound(windows.begin(), windows.end(), w) - windows.begin());
    };

    std::vector<GridPoint> points(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t k) {
        const auto& job = jobs[k];
        GridPoint& point = points[k];
        point.open = job.open;
        point.close = job.close;
        point.window = job.window;
        const auto ti = trace_index(job.window);
        if (!traces[ti]) {
            point.status = PointStatus::Failed;
            point.error = trace_errors[ti];
            return;
        }
        try {
            GatevPolicy policy;
            const auto bt = run_backtest(series, *traces[ti], Thresholds{job.open, job.close}, policy, config);
            point.trades = bt.trades.size();
            point.rtot = rtot(config.initial_cash, std::max(bt.final_value(), 0.0),
                              static_cast<double>(bt.steps()));
        } catch (const Error& e) {
            point.status = PointStatus::Failed;
            point.error = std::string(to_string(e.code()));
        }
    });

    GridResult result;
    for (auto& p : points) (p.status == PointStatus::Ok ? result.ranked : result.failed).push_back(std::move(p));
    std::sort(result.ranked.begin(), result.ranked.end(), ranks_before);
    return result;
}

const GridPoint& select_best(const std::vector<GridPoint>& ranked) {
    if (ranked.empty()) throw Error(Errc::NoSuccessfulPoint, "no successful grid point to select");
    return ranked.front();
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
    out << "OT,CT,W,rtot,trades,status\n";
    const auto row = [&](const GridPoint& p) {
        out << fmt::format("{},{},{},{},{},{}\n", p.open, p.close, p.window, p.rtot, p.trades,
                           p.status == PointStatus::Ok ? "ok" : p.error);
    };
    for (const auto& p : result.ranked) row(p);
    for (const auto& p : result.failed) row(p);
}

}  // namespace pairtrade
