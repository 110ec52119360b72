#pragma once

#include <string>
#include <vector>

#include "alphaforge/backtest.hpp"

namespace alphaforge {

struct RegressionResult {
    std::vector<std::string> names; // regressor names, intercept first if present
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> t_statistics;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double f_statistic = 0.0;
    int n_obs = 0;
};

/// Standard least squares via a rank-revealing QR factorization; standard
/// errors from sigma^2 (X'X)^-1, F against the intercept-only model.
/// Columns of X exclude the intercept; pass include_intercept to add one.
RegressionResult ols_fit(const std::vector<double>& y,
                         const std::vector<std::vector<double>>& x_columns,
                         bool include_intercept,
                         std::vector<std::string> names = {});

/// ln(R) on ln(sigma) [and ln(T)] with intercept, R and sigma daily. Alphas
/// with non-positive R, sigma or T are excluded; excluded ids (0-based
/// positions when ids are not supplied) are reported through `excluded`.
RegressionResult regress_return_vol(const std::vector<AlphaStats>& stats, bool include_turnover,
                                    std::vector<int>* excluded = nullptr);

/// Symmetric tensor flattenings of demeaned log turnover over strict
/// lower-triangular pairs (i > j), row-major: x = 1, y = l_i + l_j,
/// z = l_i * l_j with l = ln(T) - mean(ln T).
struct TurnoverTensors {
    std::vector<double> x, y, z;
};

TurnoverTensors build_turnover_tensors(const std::vector<double>& turnover);

/// Psi_a over y_a, z_a with intercept, pairs flattened in the tensor order.
/// The regressors are centered so the intercept models Mean(Psi_a); slope
/// estimates are unaffected by the centering.
RegressionResult regress_corr_on_turnover(const AlphaCorrMatrix& psi,
                                          const std::vector<double>& turnover);

/// ln(sigma) on ln(T) with intercept.
RegressionResult regress_vol_on_turnover(const std::vector<AlphaStats>& stats);

struct QuantileSummary {
    double min, q1, median, mean, q3, max;
};

/// Linear-interpolation quantiles (the convention where the p-quantile sits
/// at fractional index (n-1)p of the sorted sample).
QuantileSummary summarize_quantiles(std::vector<double> values);

std::string format_regression(const std::string& title, const RegressionResult& reg);
std::string regression_to_csv(const RegressionResult& reg);
std::string format_summary_table(const std::vector<std::pair<std::string, QuantileSummary>>& rows);

/// The published reference tables (proprietary-data results); for visual
/// comparison only, never asserted against.
const std::string& reference_tables_text();

} // namespace alphaforge
