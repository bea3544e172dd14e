// grid_tuner.hpp
// Exhaustive <open threshold, close threshold, window> search for the rule
// strategy, ranked by total compound return.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pairtrade/backtest.hpp"

namespace pairtrade {

struct GridSpec {
    std::vector<double> open_thresholds;
    std::vector<double> close_thresholds;
    std::vector<std::size_t> windows;

    // OT 1.5..4.0 step 0.1, CT {0.2,0.3,0.4,0.5,1,2}, W {500,700,800,900,1000,2000}.
    static GridSpec defaults();
};

enum class PointStatus { Ok, Failed };

struct GridPoint {
    double open = 0.0;
    double close = 0.0;
    std::size_t window = 0;
    double rtot = 0.0;  // percent
    std::size_t trades = 0;
    PointStatus status = PointStatus::Ok;
    std::string error;  // error code name for failed points
};

struct GridResult {
    std::vector<GridPoint> ranked;  // successful points, best first
    std::vector<GridPoint> failed;  // in evaluation order
};

// ((V_end / V_start)^(1/t) - 1) * 100.
double rtot(double v_start, double v_end, double t);

// Total order used for ranking: higher rtot, then smaller W, larger OT, larger CT.
bool ranks_before(const GridPoint& a, const GridPoint& b);

// One gatev backtest per combination with OT > CT. threads = 0 uses all cores.
GridResult grid_search(const AlignedPairSeries& series, const GridSpec& spec, const BacktestConfig& config,
                       unsigned threads = 1);

const GridPoint& select_best(const std::vector<GridPoint>& ranked);

// OT,CT,W,rtot,trades,status
void write_grid_csv(std::ostream& out, const GridResult& result);

}  // namespace pairtrade
