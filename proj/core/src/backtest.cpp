#include "alphaforge/backtest.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "alphaforge/errors.hpp"

namespace alphaforge {

namespace {

const double kNaN = std::nan("");
constexpr double kNeutralTol = 1e-10;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct Moments {
    double mean = 0.0;
    double stdev = 0.0; // sample (n-1)
    int n = 0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    double sum = 0.0;
    for (double v : xs)
        if (!std::isnan(v)) { sum += v; ++m.n; }
    if (m.n == 0) return m;
    m.mean = sum / m.n;
    if (m.n < 2) return m;
    double ss = 0.0;
    for (double v : xs)
        if (!std::isnan(v)) { const double d = v - m.mean; ss += d * d; }
    m.stdev = std::sqrt(ss / (m.n - 1));
    return m;
}

} // namespace

WeightMatrix alpha_to_weights(const Panel& alpha_values) {
    const std::size_t T = alpha_values.rows(), N = alpha_values.cols();
    Panel w(alpha_values.calendar(), alpha_values.universe(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double v = alpha_values.at(t, i);
            if (!std::isnan(v)) { sum += v; ++n; }
        }
        if (n == 0) continue;
        const double mean = sum / n;
        double gross = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double v = alpha_values.at(t, i);
            if (!std::isnan(v)) gross += std::abs(v - mean);
        }
        if (gross == 0.0) continue; // no cross-sectional spread: stay flat
        for (std::size_t i = 0; i < N; ++i) {
            const double v = alpha_values.at(t, i);
            if (!std::isnan(v)) w.set(t, i, (v - mean) / gross);
        }
    }
    return WeightMatrix{std::move(w)};
}

SimResult simulate(const WeightMatrix& weights, const MarketData& market, int delay_class,
                   double book_size) {
    const Panel& w = weights.weights;
    if (w.rows() != market.calendar->size() || w.cols() != market.universe->size())
        throw DataError("weight matrix shape does not match the market panel");
    if (!(book_size > 0.0)) throw DataError("book size must be positive");

    const std::size_t T = w.rows(), N = w.cols();
    for (std::size_t t = 0; t < T; ++t) {
        double net = 0.0, gross = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double v = w.at(t, i);
            if (std::isnan(v)) throw DataError("weight matrix contains NaN");
            net += v;
            gross += std::abs(v);
        }
        if (gross == 0.0) continue;
        if (std::abs(net) > kNeutralTol)
            throw DataError("weights on day " + market.calendar->dates()[t] +
                            " are not dollar-neutral");
        if (std::abs(gross - 1.0) > kNeutralTol)
            throw DataError("weights on day " + market.calendar->dates()[t] +
                            " do not have unit gross");
    }

    SimResult sim;
    sim.calendar = market.calendar;
    sim.book_size = book_size;
    sim.daily_pnl.assign(T, kNaN);
    sim.daily_traded_dollars.assign(T, kNaN);
    sim.daily_traded_shares.assign(T, kNaN);

    // First day with an open position; everything earlier is undefined.
    std::size_t first_active = T;
    for (std::size_t t = 0; t < T && first_active == T; ++t)
        for (std::size_t i = 0; i < N; ++i)
            if (w.at(t, i) != 0.0) { first_active = t; break; }
    if (first_active == T) return sim;

    (void)delay_class; // metadata only: same close-to-close arithmetic

    for (std::size_t t = first_active; t < T; ++t) {
        double dollars = 0.0, shares = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double prev = t == first_active ? 0.0 : w.at(t - 1, i);
            const double dw = std::abs(w.at(t, i) - prev);
            dollars += book_size * dw;
            const double px = market.close.at(t, i);
            if (dw > 0.0 && !std::isnan(px) && px > 0.0) shares += book_size * dw / px;
        }
        sim.daily_traded_dollars[t] = dollars;
        sim.daily_traded_shares[t] = shares;

        if (t > first_active) {
            double pnl = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double wi = w.at(t - 1, i);
                const double r = market.returns.at(t, i);
                if (wi != 0.0 && !std::isnan(r)) pnl += book_size * wi * r;
            }
            sim.daily_pnl[t] = pnl;
        }
    }
    return sim;
}

AlphaStats compute_stats(const SimResult& sim) {
    const Moments pnl = moments(sim.daily_pnl);
    if (pnl.n < 2) throw DataError("need at least 2 valid P&L days to compute statistics");
    const Moments dollars = moments(sim.daily_traded_dollars);
    const Moments shares = moments(sim.daily_traded_shares);

    AlphaStats s;
    s.sharpe = pnl.stdev > 0.0 ? std::sqrt(252.0) * pnl.mean / pnl.stdev : kNaN;
    s.turnover = dollars.n > 0 ? dollars.mean / sim.book_size : kNaN;
    s.holding_period = s.turnover > 0.0 ? 1.0 / s.turnover : kNaN;
    s.cents_per_share = shares.mean > 0.0 ? 100.0 * pnl.mean / shares.mean : kNaN;
    s.daily_vol = pnl.stdev / sim.book_size;
    s.ann_return = 252.0 * pnl.mean / sim.book_size;
    return s;
}

AlphaCorrMatrix alpha_corr_matrix(const std::map<int, std::vector<double>>& daily_returns) {
    AlphaCorrMatrix out;
    std::vector<const std::vector<double>*> series;
    for (const auto& [id, xs] : daily_returns) {
        out.ids.push_back(id);
        series.push_back(&xs);
    }
    const std::size_t K = series.size();
    if (K == 0) throw DataError("correlation matrix needs at least one return series");
    const std::size_t T = series[0]->size();
    for (const auto* s : series)
        if (s->size() != T) throw DataError("return series have mismatched lengths");

    std::vector<std::size_t> common;
    for (std::size_t t = 0; t < T; ++t) {
        bool ok = true;
        for (const auto* s : series)
            if (std::isnan((*s)[t])) { ok = false; break; }
        if (ok) common.push_back(t);
    }
    const std::size_t n = common.size();
    if (n < 2) throw DataError("need at least 2 common valid days across all return series");

    std::vector<double> mean(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t t : common) mean[k] += (*series[k])[t];
        mean[k] /= n;
    }
    std::vector<std::vector<double>> cov(K, std::vector<double>(K, 0.0));
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = a; b < K; ++b) {
            double acc = 0.0;
            for (std::size_t t : common)
                acc += ((*series[a])[t] - mean[a]) * ((*series[b])[t] - mean[b]);
            cov[a][b] = cov[b][a] = acc / (n - 1);
        }

    out.sigma.resize(K);
    for (std::size_t k = 0; k < K; ++k) out.sigma[k] = std::sqrt(cov[k][k]);
    out.psi.assign(K, std::vector<double>(K, kNaN));
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b) {
            if (a == b) { out.psi[a][b] = 1.0; continue; }
            const double denom = out.sigma[a] * out.sigma[b];
            out.psi[a][b] = denom > 0.0 ? cov[a][b] / denom : kNaN;
        }
    return out;
}

std::string stats_to_csv(const std::map<int, AlphaStats>& stats) {
    std::ostringstream out;
    out << "id,S,T,holding_period,C,sigma,ann_return,delay\n";
    for (const auto& [id, s] : stats)
        out << id << ',' << fmt(s.sharpe) << ',' << fmt(s.turnover) << ','
            << fmt(s.holding_period) << ',' << fmt(s.cents_per_share) << ','
            << fmt(s.daily_vol) << ',' << fmt(s.ann_return) << ',' << s.delay_class << '\n';
    return out.str();
}

std::string corr_to_csv(const AlphaCorrMatrix& corr) {
    std::ostringstream out;
    out << "id";
    for (int id : corr.ids) out << ',' << id;
    out << '\n';
    for (std::size_t a = 0; a < corr.ids.size(); ++a) {
        out << corr.ids[a];
        for (std::size_t b = 0; b < corr.ids.size(); ++b) out << ',' << fmt(corr.psi[a][b]);
        out << '\n';
    }
    return out.str();
}

} // namespace alphaforge
