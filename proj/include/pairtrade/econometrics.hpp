// econometrics.hpp
// Correlation, OLS, ADF unit-root and Engle-Granger cointegration tests, SSD,
// and the windowed pair-formation scoring.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairtrade/market_data.hpp"

namespace pairtrade {

struct MomentSummary {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double std_x = 0.0;  // population
    double std_y = 0.0;
    double cov_xy = 0.0;
    std::size_t n = 0;
};

struct OlsFit {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> residuals;
    double rss = 0.0;
};

// Deterministic terms in the ADF regression. NoConstant is the literal
// Δε_t = γ ε_{t-1} + Σ δ_i Δε_{t-i} + ν_t form.
enum class AdfRegression { NoConstant, Constant };

// Which critical-value surface the t statistic is compared against.
enum class CriticalTable {
    DickeyFullerNoConstant,
    DickeyFullerConstant,
    EngleGranger2,  // residuals of a two-variable cointegrating regression with intercept
};

struct AdfOptions {
    std::optional<std::size_t> lags;  // default: Schwert rule floor(12 (n/100)^(1/4))
    double significance = 0.05;       // one of 0.01, 0.05, 0.10
    AdfRegression regression = AdfRegression::NoConstant;
    std::optional<CriticalTable> table;  // default follows `regression`
};

struct AdfResult {
    double gamma_hat = 0.0;
    double t_stat = 0.0;
    std::size_t lags_used = 0;
    std::size_t n_effective = 0;
    double critical_value = 0.0;
    std::vector<double> regression_residuals;
    bool stationary = false;
    double significance = 0.05;
};

struct EngleGrangerResult {
    bool cointegrated = false;
    AdfResult adf;
    OlsFit fit;
};

struct PairScore {
    double coint_score = 0.0;
    double corr_score = 0.0;
    std::size_t windows_evaluated = 0;
};

MomentSummary moments(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);
double ssd(std::span<const double> p_i, std::span<const double> p_j);
// Regress y on x with intercept.
OlsFit ols(std::span<const double> y, std::span<const double> x);

std::size_t schwert_lags(std::size_t n);
// Critical value at `significance` for an effective sample of n_effective,
// linearly interpolated in 1/n between tabulated sample sizes.
double critical_value(CriticalTable table, double significance, std::size_t n_effective);

AdfResult adf_test(std::span<const double> series, const AdfOptions& options = {});

// OLS of y on x, then a no-constant ADF on the residuals judged against the
// two-variable residual-based critical values (unless options.table overrides).
EngleGrangerResult engle_granger(std::span<const double> y, std::span<const double> x,
                                 const AdfOptions& options = {});

struct WindowOptions {
    std::size_t window = 1440;
    std::size_t step = 1440;
    AdfOptions adf{};
    unsigned threads = 1;
};

// Slides a window over the pair (regressand = prices_i). Windows raising
// ZeroVariance/SingularDesign/DegenerateResiduals/InsufficientData are skipped.
PairScore windowed_pair_scores(const AlignedPairSeries& pair, const WindowOptions& options);

// Descending coint_score, then corr_score, then name.
std::vector<std::string> rank_pairs(const std::map<std::string, PairScore>& scores);

}  // namespace pairtrade
