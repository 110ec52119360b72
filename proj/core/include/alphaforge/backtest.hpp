#pragma once

#include <map>
#include <string>
#include <vector>

#include "alphaforge/market_data.hpp"
#include "alphaforge/panel.hpp"

namespace alphaforge {

/// Daily dollar weights as fractions of book. On every day with any nonzero
/// weight the portfolio is dollar-neutral (|sum w| <= 1e-10) with unit gross
/// (|sum |w|| - 1 <= 1e-10). Missing assets carry weight 0, never NaN.
struct WeightMatrix {
    Panel weights;
};

/// Demean-then-normalize position construction: per day, absent (NaN) alpha
/// cells get weight 0, the rest are demeaned and scaled to unit gross.
/// A day with zero cross-sectional spread is all zeros.
WeightMatrix alpha_to_weights(const Panel& alpha_values);

struct SimResult {
    CalendarPtr calendar;
    std::vector<double> daily_pnl;            // currency; NaN = undefined day
    std::vector<double> daily_traded_dollars; // buys plus sells
    std::vector<double> daily_traded_shares;
    double book_size = 0.0;
};

/// Daily full rebalance to target weights at a constant book. Weights from
/// day t earn day t+1 close-to-close returns. Days before the first active
/// position are NaN and excluded from statistics. delay_class is carried as
/// metadata only: delay-0 alphas trade at the same close with identical
/// arithmetic, intraday execution being out of scope.
SimResult simulate(const WeightMatrix& weights, const MarketData& market, int delay_class,
                   double book_size);

struct AlphaStats {
    double sharpe = 0.0;          // sqrt(252) * mean(pnl) / stdev(pnl)
    double turnover = 0.0;        // mean(traded dollars) / book
    double holding_period = 0.0;  // 1 / turnover, days
    double cents_per_share = 0.0; // 100 * mean(pnl) / mean(shares)
    double daily_vol = 0.0;       // stdev of daily return pnl/book
    double ann_return = 0.0;      // 252 * mean(pnl/book)
    int delay_class = 1;
};

/// Requires >= 2 valid P&L days; throws DataError otherwise.
AlphaStats compute_stats(const SimResult& sim);

/// Pairwise alpha correlation matrix Psi derived from the sample covariance
/// of realized daily returns over the days common to all series.
struct AlphaCorrMatrix {
    std::vector<int> ids;
    std::vector<std::vector<double>> psi; // symmetric, unit diagonal
    std::vector<double> sigma;            // per-alpha daily vol
};

AlphaCorrMatrix alpha_corr_matrix(const std::map<int, std::vector<double>>& daily_returns);

/// CSV exports: stats with header id,S,T,holding_period,C,sigma,ann_return,delay;
/// correlation as a square matrix with an id header row and column.
std::string stats_to_csv(const std::map<int, AlphaStats>& stats);
std::string corr_to_csv(const AlphaCorrMatrix& corr);

} // namespace alphaforge
