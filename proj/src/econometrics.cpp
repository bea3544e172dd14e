#include "pairtrade/econometrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "pairtrade/errors.hpp"
#include "pairtrade/parallel.hpp"

namespace pairtrade {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y, const char* who) {
    if (x.size() != y.size()) {
        throw Error(Errc::LengthMismatch, std::string(who) + ": sequences differ in length (" +
                                              std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    }
}

bool is_constant(std::span<const double> v) {
    if (v.empty()) return true;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Rows: sample sizes; columns: 1%, 5%, 10%. Values from the MacKinnon (2010)
// response surfaces evaluated at each tabulated size; the last row is asymptotic.
struct CriticalRow {
    double n;
    std::array<double, 3> tau;
};

constexpr double kAsymptotic = 0.0;  // 1/n for the asymptotic row

constexpr std::array<CriticalRow, 7> kNoConstant{{
    {25, {-2.6610, -1.9551, -1.6089}},
    {50, {-2.6119, -1.9475, -1.6124}},
    {100, {-2.5885, -1.9440, -1.6144}},
    {250, {-2.5747, -1.9421, -1.6158}},
    {500, {-2.5702, -1.9416, -1.6163}},
    {1000, {-2.5680, -1.9413, -1.6166}},
    {kAsymptotic, {-2.5657, -1.9410, -1.6168}},
}};

constexpr std::array<CriticalRow, 7> kConstant{{
    {25, {-3.7239, -2.9865, -2.6328}},
    {50, {-3.5685, -2.9214, -2.5987}},
    {100, {-3.4975, -2.8909, -2.5824}},
    {250, {-3.4568, -2.8732, -2.5730}},
    {500, {-3.4435, -2.8673, -2.5699}},
    {1000, {-3.4369, -2.8644, -2.5683}},
    {kAsymptotic, {-3.4304, -2.8615, -2.5668}},
}};

constexpr std::array<CriticalRow, 7> kEngleGranger2{{
    {25, {-4.3882, -3.5915, -3.2184}},
    {50, {-4.1289, -3.4611, -3.1304}},
    {100, {-4.0093, -3.3979, -3.0871}},
    {250, {-3.9408, -3.3607, -3.0615}},
    {500, {-3.9185, -3.3484, -3.0529}},
    {1000, {-3.9074, -3.3422, -3.0487}},
    {kAsymptotic, {-3.8964, -3.3361, -3.0445}},
}};

std::size_t significance_column(double significance) {
    if (std::abs(significance - 0.01) < 1e-12) return 0;
    if (std::abs(significance - 0.05) < 1e-12) return 1;
    if (std::abs(significance - 0.10) < 1e-12) return 2;
    throw Error(Errc::InvalidArgument, "significance must be one of 0.01, 0.05, 0.10");
}

}  // namespace

MomentSummary moments(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "moments");
    if (x.empty()) throw Error(Errc::InsufficientData, "moments: empty input");
    MomentSummary m;
    m.n = x.size();
    m.mean_x = mean_of(x);
    m.mean_y = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - m.mean_x;
        const double dy = y[t] - m.mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double n = static_cast<double>(m.n);
    m.std_x = std::sqrt(sxx / n);
    m.std_y = std::sqrt(syy / n);
    m.cov_xy = sxy / n;
    return m;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "pearson");
    if (x.size() < 3) throw Error(Errc::InsufficientData, "pearson needs at least 3 observations");
    if (is_constant(x) || is_constant(y)) throw Error(Errc::ZeroVariance, "pearson: constant input");
    const auto m = moments(x, y);
    if (m.std_x == 0.0 || m.std_y == 0.0) throw Error(Errc::ZeroVariance, "pearson: zero standard deviation");
    return std::clamp(m.cov_xy / (m.std_x * m.std_y), -1.0, 1.0);
}

double ssd(std::span<const double> p_i, std::span<const double> p_j) {
    require_same_length(p_i, p_j, "ssd");
    double total = 0.0;
    for (std::size_t t = 0; t < p_i.size(); ++t) {
        const double d = p_i[t] - p_j[t];
        total += d * d;
    }
    return total;
}

OlsFit ols(std::span<const double> y, std::span<const double> x) {
    require_same_length(y, x, "ols");
    if (x.size() < 3) throw Error(Errc::InsufficientData, "ols needs at least 3 observations");
    if (is_constant(x)) throw Error(Errc::SingularDesign, "ols: regressor is constant");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - mx;
        sxx += dx * dx;
        sxy += dx * (y[t] - my);
    }
    if (sxx == 0.0) throw Error(Errc::SingularDesign, "ols: regressor has zero variance");
    OlsFit fit;
    fit.beta = sxy / sxx;
    fit.alpha = my - fit.beta * mx;
    fit.residuals.resize(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double r = y[t] - fit.alpha - fit.beta * x[t];
        fit.residuals[t] = r;
        fit.rss += r * r;
    }
    return fit;
}

std::size_t schwert_lags(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double critical_value(CriticalTable table, double significance, std::size_t n_effective) {
    const std::size_t col = significance_column(significance);
    const auto& rows = table == CriticalTable::DickeyFullerNoConstant ? kNoConstant
                       : table == CriticalTable::DickeyFullerConstant ? kConstant
                                                                      : kEngleGranger2;
    // Sizes below the smallest tabulated one use that row.
    const double inv_n = n_effective <= static_cast<std::size_t>(rows.front().n)
                             ? 1.0 / rows.front().n
                             : 1.0 / static_cast<double>(n_effective);
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const double hi = 1.0 / rows[k].n;
        const double lo = rows[k + 1].n == kAsymptotic ? 0.0 : 1.0 / rows[k + 1].n;
        if (inv_n <= hi && inv_n >= lo) {
            const double w = (inv_n - lo) / (hi - lo);
            return w * rows[k].tau[col] + (1.0 - w) * rows[k + 1].tau[col];
        }
    }
    return rows.back().tau[col];
}

AdfResult adf_test(std::span<const double> series, const AdfOptions& options) {
    const std::size_t n = series.size();
    if (n >= 2 && is_constant(series)) throw Error(Errc::ZeroVariance, "adf_test: constant series");
    const std::size_t lags = options.lags.value_or(schwert_lags(n));
    if (n < lags + 11) {
        throw Error(Errc::InsufficientData, "adf_test: " + std::to_string(n) + " observations with " +
                                                std::to_string(lags) + " lags leaves fewer than 10 effective");
    }
    const std::size_t n_eff = n - 1 - lags;
    const bool with_constant = options.regression == AdfRegression::Constant;
    const std::size_t k = 1 + lags + (with_constant ? 1 : 0);
    if (n_eff <= k) throw Error(Errc::InsufficientData, "adf_test: not enough degrees of freedom");

    std::vector<double> diff(n - 1);
    for (std::size_t t = 1; t < n; ++t) diff[t - 1] = series[t] - series[t - 1];

    // Row r corresponds to Δε_t with t = lags + 1 + r.
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n_eff), static_cast<Eigen::Index>(k));
    Eigen::VectorXd target(static_cast<Eigen::Index>(n_eff));
    for (std::size_t r = 0; r < n_eff; ++r) {
        const std::size_t t = lags + 1 + r;
        const auto row = static_cast<Eigen::Index>(r);
        target(row) = diff[t - 1];
        design(row, 0) = series[t - 1];
        for (std::size_t i = 1; i <= lags; ++i) design(row, static_cast<Eigen::Index>(i)) = diff[t - 1 - i];
        if (with_constant) design(row, static_cast<Eigen::Index>(k - 1)) = 1.0;
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(k)) throw Error(Errc::SingularDesign, "adf_test: rank-deficient design");
    const Eigen::VectorXd coef = qr.solve(target);
    const Eigen::VectorXd resid = target - design * coef;
    const double rss = resid.squaredNorm();
    const double sigma2 = rss / static_cast<double>(n_eff - k);

    const auto ki = static_cast<Eigen::Index>(k);
    const Eigen::MatrixXd r_upper = qr.matrixR().topLeftCorner(ki, ki).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r_upper.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(ki, ki));
    const Eigen::MatrixXd xtx_inv_perm = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * xtx_inv_perm * perm.transpose();
    const double se = std::sqrt(sigma2 * xtx_inv(0, 0));
    if (!(se > 0.0) || !std::isfinite(se)) throw Error(Errc::ZeroVariance, "adf_test: zero residual variance");

    AdfResult result;
    result.gamma_hat = coef(0);
    result.t_stat = coef(0) / se;
    result.lags_used = lags;
    result.n_effective = n_eff;
    result.significance = options.significance;
    result.regression_residuals.assign(resid.data(), resid.data() + resid.size());
    const CriticalTable table = options.table.value_or(with_constant ? CriticalTable::DickeyFullerConstant
                                                                     : CriticalTable::DickeyFullerNoConstant);
    result.critical_value = critical_value(table, options.significance, n_eff);
    result.stationary = result.t_stat < result.critical_value;
    return result;
}

EngleGrangerResult engle_granger(std::span<const double> y, std::span<const double> x, const AdfOptions& options) {
    EngleGrangerResult result;
    result.fit = ols(y, x);
    const auto& res = result.fit.residuals;
    const double n = static_cast<double>(res.size());
    const double resid_var = result.fit.rss / n;
    const auto my = moments(y, y);
    if (resid_var < 1e-12 * std::max(1.0, my.std_y * my.std_y)) {
        throw Error(Errc::DegenerateResiduals, "engle_granger: exact linear relation");
    }
    AdfOptions adf_options = options;
    if (!adf_options.table) adf_options.table = CriticalTable::EngleGranger2;
    result.adf = adf_test(res, adf_options);
    result.cointegrated = result.adf.stationary;
    return result;
}

PairScore windowed_pair_scores(const AlignedPairSeries& pair, const WindowOptions& options) {
    if (options.window == 0 || options.step == 0) throw Error(Errc::InvalidArgument, "window and step must be positive");
    const std::size_t n = pair.size();
    if (n < options.window) {
        throw Error(Errc::SeriesTooShort, "series of " + std::to_string(n) + " rows shorter than window " +
                                              std::to_string(options.window));
    }
    const std::size_t count = (n - options.window) / options.step + 1;

    struct WindowOutcome {
        bool valid = false;
        double corr = 0.0;
        bool cointegrated = false;
    };
    std::vector<WindowOutcome> outcomes(count);
    parallel_for(count, options.threads, [&](std::size_t w) {
        const std::size_t start = w * options.step;
        const std::span<const double> pi(pair.prices_i.data() + start, options.window);
        const std::span<const double> pj(pair.prices_j.data() + start, options.window);
        try {
            WindowOutcome out;
            out.corr = pearson(pi, pj);
            out.cointegrated = engle_granger(pi, pj, options.adf).cointegrated;
            out.valid = true;
            outcomes[w] = out;
        } catch (const Error& e) {
            switch (e.code()) {
                case Errc::ZeroVariance:
                case Errc::SingularDesign:
                case Errc::DegenerateResiduals:
                case Errc::InsufficientData:
                    break;
                default:
                    throw;
            }
        }
    });

    PairScore score;
    double corr_sum = 0.0;
    std::size_t passed = 0;
    for (const auto& o : outcomes) {
        if (!o.valid) continue;
        ++score.windows_evaluated;
        corr_sum += o.corr;
        passed += o.cointegrated ? 1 : 0;
    }
    if (score.windows_evaluated == 0) throw Error(Errc::NoValidWindow, "no window produced valid statistics");
    score.corr_score = corr_sum / static_cast<double>(score.windows_evaluated);
    score.coint_score = static_cast<double>(passed) / static_cast<double>(score.windows_evaluated);
    return score;
}

std::vector<std::string> rank_pairs(const std::map<std::string, PairScore>& scores) {
    std::vector<std::string> names;
    names.reserve(scores.size());
    for (const auto& [name, _] : scores) names.push_back(name);
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
        const auto& sa = scores.at(a);
        const auto& sb = scores.at(b);
        if (sa.coint_score != sb.coint_score) return sa.coint_score > sb.coint_score;
        if (sa.corr_score != sb.corr_score) return sa.corr_score > sb.corr_score;
        return a < b;
    });
    return names;
}

}  // namespace pairtrade
