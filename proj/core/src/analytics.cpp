#include "alphaforge/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

const double kNaN = std::nan("");

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

} // namespace

RegressionResult ols_fit(const std::vector<double>& y,
                         const std::vector<std::vector<double>>& x_columns,
                         bool include_intercept, std::vector<std::string> names) {
    const int n = static_cast<int>(y.size());
    const int k = static_cast<int>(x_columns.size());
    const int p = k + (include_intercept ? 1 : 0);
    if (p == 0) throw DataError("regression has no regressors");
    for (const auto& col : x_columns)
        if (static_cast<int>(col.size()) != n)
            throw DataError("regressor column length does not match y");
    if (n <= p)
        throw DataError("need more than " + std::to_string(p) + " observations, got " +
                        std::to_string(n));

    if (names.empty()) {
        for (int j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<int>(names.size()) == k && include_intercept)
        names.insert(names.begin(), "intercept");
    if (static_cast<int>(names.size()) != p)
        throw DataError("regressor name count does not match the design matrix");

    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd Y(n);
    for (int t = 0; t < n; ++t) {
        Y(t) = y[t];
        int c = 0;
        if (include_intercept) X(t, c++) = 1.0;
        for (int j = 0; j < k; ++j) X(t, c++) = x_columns[j][t];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p) {
        const auto perm = qr.colsPermutation().indices();
        std::string dependent;
        for (int j = qr.rank(); j < p; ++j) {
            if (!dependent.empty()) dependent += ", ";
            dependent += names[perm(j)];
        }
        throw DataError("design matrix is rank-deficient; dependent column(s): " + dependent);
    }

    const Eigen::VectorXd beta = qr.solve(Y);
    const Eigen::VectorXd resid = Y - X * beta;
    const double rss = resid.squaredNorm();
    const double sigma2 = rss / static_cast<double>(n - p);
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(p, p));

    RegressionResult res;
    res.names = std::move(names);
    res.n_obs = n;
    res.coefficients.resize(p);
    res.standard_errors.resize(p);
    res.t_statistics.resize(p);
    for (int j = 0; j < p; ++j) {
        res.coefficients[j] = beta(j);
        res.standard_errors[j] = std::sqrt(sigma2 * xtx_inv(j, j));
        res.t_statistics[j] =
            res.standard_errors[j] > 0.0 ? beta(j) / res.standard_errors[j] : kNaN;
    }

    double tss;
    if (include_intercept) {
        const double ybar = Y.mean();
        tss = (Y.array() - ybar).square().sum();
    } else {
        tss = Y.squaredNorm();
    }
    res.r_squared = tss > 0.0 ? 1.0 - rss / tss : kNaN;
    const int df_model = include_intercept ? p - 1 : p;
    const int df_total = include_intercept ? n - 1 : n;
    res.adj_r_squared =
        tss > 0.0 ? 1.0 - (1.0 - res.r_squared) * df_total / (n - p) : kNaN;
    res.f_statistic = df_model > 0 && res.r_squared < 1.0
                          ? (res.r_squared / df_model) / ((1.0 - res.r_squared) / (n - p))
                          : kNaN;
    return res;
}

RegressionResult regress_return_vol(const std::vector<AlphaStats>& stats, bool include_turnover,
                                    std::vector<int>* excluded) {
    std::vector<double> ln_r, ln_sigma, ln_t;
    if (excluded) excluded->clear();
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const AlphaStats& s = stats[i];
        const double r_daily = s.ann_return / 252.0;
        const bool usable = r_daily > 0.0 && s.daily_vol > 0.0 &&
                            (!include_turnover || s.turnover > 0.0);
        if (!usable) {
            if (excluded) excluded->push_back(static_cast<int>(i));
            continue;
        }
        ln_r.push_back(std::log(r_daily));
        ln_sigma.push_back(std::log(s.daily_vol));
        if (include_turnover) ln_t.push_back(std::log(s.turnover));
    }
    if (ln_r.size() < 3)
        throw DataError("need at least 3 alphas with positive return, volatility" +
                        std::string(include_turnover ? " and turnover" : "") +
                        " for the log-log regression");

    std::vector<std::vector<double>> cols{ln_sigma};
    std::vector<std::string> names{"intercept", "ln(sigma)"};
    if (include_turnover) {
        cols.push_back(ln_t);
        names.push_back("ln(T)");
    }
    return ols_fit(ln_r, cols, /*include_intercept=*/true, std::move(names));
}

TurnoverTensors build_turnover_tensors(const std::vector<double>& turnover) {
    const std::size_t N = turnover.size();
    if (N < 3) throw DataError("turnover tensors need at least 3 alphas");
    std::vector<double> ell(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (!(turnover[i] > 0.0))
            throw DataError("turnover must be positive to take logs (alpha index " +
                            std::to_string(i) + ")");
        ell[i] = std::log(turnover[i]);
    }
    const double m = mean_of(ell);
    for (double& v : ell) v -= m;

    TurnoverTensors t;
    const std::size_t M = N * (N - 1) / 2;
    t.x.reserve(M);
    t.y.reserve(M);
    t.z.reserve(M);
    for (std::size_t i = 1; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            t.x.push_back(1.0);
            t.y.push_back(ell[i] + ell[j]);
            t.z.push_back(ell[i] * ell[j]);
        }
    return t;
}

RegressionResult regress_corr_on_turnover(const AlphaCorrMatrix& psi,
                                          const std::vector<double>& turnover) {
    const std::size_t N = psi.ids.size();
    if (turnover.size() != N)
        throw DataError("turnover vector length does not match the correlation matrix");
    TurnoverTensors t = build_turnover_tensors(turnover);

    std::vector<double> psi_a;
    psi_a.reserve(t.y.size());
    for (std::size_t i = 1; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double v = psi.psi[i][j];
            if (std::isnan(v)) throw DataError("correlation matrix contains NaN entries");
            psi_a.push_back(v);
        }

    // Center both regressors so the fitted intercept equals Mean(Psi_a); the
    // slope estimates are invariant under this shift.
    const double ybar = mean_of(t.y), zbar = mean_of(t.z);
    for (double& v : t.y) v -= ybar;
    for (double& v : t.z) v -= zbar;
    return ols_fit(psi_a, {t.y, t.z}, /*include_intercept=*/true,
                   {"intercept", "y_a", "z_a"});
}

RegressionResult regress_vol_on_turnover(const std::vector<AlphaStats>& stats) {
    std::vector<double> ln_sigma, ln_t;
    for (const AlphaStats& s : stats) {
        if (!(s.daily_vol > 0.0) || !(s.turnover > 0.0)) continue;
        ln_sigma.push_back(std::log(s.daily_vol));
        ln_t.push_back(std::log(s.turnover));
    }
    if (ln_sigma.size() < 3)
        throw DataError("need at least 3 alphas with positive volatility and turnover");
    return ols_fit(ln_sigma, {ln_t}, /*include_intercept=*/true, {"intercept", "ln(T)"});
}

QuantileSummary summarize_quantiles(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(),
                                [](double v) { return std::isnan(v); }),
                 values.end());
    if (values.empty()) throw DataError("cannot summarize an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    auto q = [&](double p) {
        const double h = (static_cast<double>(n) - 1.0) * p;
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = h - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return QuantileSummary{values.front(), q(0.25), q(0.5), mean_of(values), q(0.75),
                           values.back()};
}

std::string format_regression(const std::string& title, const RegressionResult& reg) {
    std::ostringstream out;
    out << title << "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-12s %14s %14s %12s\n", "", "Estimate", "Std. error",
                  "t-stat");
    out << buf;
    for (std::size_t j = 0; j < reg.names.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "  %-12s %14.6g %14.6g %12.4g\n", reg.names[j].c_str(),
                      reg.coefficients[j], reg.standard_errors[j], reg.t_statistics[j]);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "  R-squared %.6g (adj. %.6g), F-statistic %.6g, n = %d\n", reg.r_squared,
                  reg.adj_r_squared, reg.f_statistic, reg.n_obs);
    out << buf;
    return out.str();
}

std::string regression_to_csv(const RegressionResult& reg) {
    std::ostringstream out;
    out << "name,estimate,std_error,t_stat\n";
    for (std::size_t j = 0; j < reg.names.size(); ++j)
        out << reg.names[j] << ',' << fmt(reg.coefficients[j]) << ','
            << fmt(reg.standard_errors[j]) << ',' << fmt(reg.t_statistics[j]) << '\n';
    out << "r_squared," << fmt(reg.r_squared) << ",,\n";
    out << "adj_r_squared," << fmt(reg.adj_r_squared) << ",,\n";
    out << "f_statistic," << fmt(reg.f_statistic) << ",,\n";
    out << "n_obs," << reg.n_obs << ",,\n";
    return out.str();
}

std::string format_summary_table(
    const std::vector<std::pair<std::string, QuantileSummary>>& rows) {
    std::ostringstream out;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%-18s %11s %11s %11s %11s %11s %11s\n", "Quantity", "Min",
                  "1st Qu.", "Median", "Mean", "3rd Qu.", "Max");
    out << buf;
    for (const auto& [name, s] : rows) {
        std::snprintf(buf, sizeof(buf), "%-18s %11.4g %11.4g %11.4g %11.4g %11.4g %11.4g\n",
                      name.c_str(), s.min, s.q1, s.median, s.mean, s.q3, s.max);
        out << buf;
    }
    return out.str();
}

const std::string& reference_tables_text() {
    static const std::string text = R"(Published reference results (proprietary-data backtest, 2010-2013).
These are for visual comparison only; results on other data will differ.

Reference Table 1. Summary statistics across the 101 alphas.
Quantity           Min       1st Qu.   Median    Mean      3rd Qu.   Max
S                  1.238     1.929     2.224     2.265     2.498     4.162
T                  0.1571    0.3429    0.4752    0.5456    0.6474    1.604
1/T                0.6235    1.545     2.104     2.391     2.916     6.365
C                  0.1324    0.3125    0.3969    0.4814    0.5073    2.031
1e3*sigma          0.9318    1.194     1.395     1.747     2.019     10.44
100%*ann.return    3.285     4.4       5.441     6.015     6.296     28.72
100%*Psi_ij        -15.09    7.457     14.31     15.86     22.91     87.33

Reference Table 2. ln(R) over ln(sigma) with intercept.
              Estimate   Std. error   t-stat
intercept     -3.509     0.295        -11.88
ln(sigma)     0.761      0.046        16.65
R-squared 0.737 (adj. 0.734), F-statistic 277.2

Reference Table 3. ln(R) over ln(sigma) and ln(T) with intercept.
              Estimate   Std. error   t-stat
intercept     -3.435     0.324        -10.60
ln(sigma)     0.775      0.052        14.84
ln(T)         -0.023     0.040        -0.57
R-squared 0.738 (adj. 0.732), F-statistic 137.8

Reference Table 4. Psi_a over y_a and z_a with intercept.
              Estimate   Std. error   t-stat
intercept     0.1587     0.0017       95.18
y_a           0.0067     0.0023       2.907
z_a           0.0474     0.0063       7.537
R-squared 0.0127 (adj. 0.0123), F-statistic 32.55

Reference Table 5. ln(sigma) over ln(T) with intercept.
              Estimate   Std. error   t-stat
intercept     -6.174     0.062        -100.1
ln(T)         0.368      0.068        5.412
R-squared 0.228 (adj. 0.221), F-statistic 29.29
)";
    return text;
}

} // namespace alphaforge
