#include <doctest.h>

#include <cmath>
#include <random>

#include "alphaforge/backtest.hpp"
#include "oracles.hpp"

using namespace alphaforge;
using oracles::kNaN;

namespace {

Panel row_panel(const std::vector<std::vector<double>>& rows) {
    std::vector<std::string> dates, assets;
    for (std::size_t t = 0; t < rows.size(); ++t) dates.push_back("d" + std::to_string(t + 1));
    for (std::size_t i = 0; i < rows[0].size(); ++i) assets.push_back("A" + std::to_string(i));
    auto cal = std::make_shared<const TradingCalendar>(std::move(dates));
    auto uni = std::make_shared<const Universe>(std::move(assets));
    Panel p(cal, uni, 0.0);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t i = 0; i < rows[t].size(); ++i) p.set(t, i, rows[t][i]);
    return p;
}

/// 5-day, 3-asset market with fixed closes; other panels are consistent fillers.
MarketData hand_market() {
    const std::vector<std::vector<double>> closes = {
        {100, 50, 200}, {102, 49, 202}, {101, 50, 200}, {103, 51, 198}, {104, 50, 200}};
    Panel close = row_panel(closes);
    MarketData m(close.calendar(), close.universe());
    m.close = close;
    m.open = close;
    m.vwap = close;
    Panel hi = close, lo = close;
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t i = 0; i < 3; ++i) {
            hi.set(t, i, close.at(t, i) * 1.01);
            lo.set(t, i, close.at(t, i) * 0.99);
        }
    m.high = hi;
    m.low = lo;
    m.volume = Panel(close.calendar(), close.universe(), 1000.0);
    m.returns = derive_returns(close);
    return m;
}

} // namespace

TEST_CASE("alpha_to_weights hand examples") {
    SUBCASE("[1,2,3] demeans and normalizes to [-0.5, 0, 0.5]") {
        WeightMatrix w = alpha_to_weights(row_panel({{1, 2, 3}}));
        CHECK(w.weights.at(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(w.weights.at(0, 1) == doctest::Approx(0.0));
        CHECK(w.weights.at(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("NaN cells get zero weight, rest over present assets") {
        WeightMatrix w = alpha_to_weights(row_panel({{4, kNaN, 6}}));
        CHECK(w.weights.at(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(w.weights.at(0, 1) == 0.0);
        CHECK(w.weights.at(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("constant row is flat") {
        WeightMatrix w = alpha_to_weights(row_panel({{7, 7, 7}}));
        for (std::size_t i = 0; i < 3; ++i) CHECK(w.weights.at(0, i) == 0.0);
    }
}

TEST_CASE("alpha_to_weights invariance under positive affine transforms") {
    Panel a = oracles::make_random_panel(30, 12, 5, 0.1);
    Panel b(a.calendar(), a.universe(), 0.0);
    for (std::size_t t = 0; t < a.rows(); ++t)
        for (std::size_t i = 0; i < a.cols(); ++i) b.set(t, i, 3.7 * a.at(t, i) - 11.0);
    CHECK(oracles::max_abs_diff(alpha_to_weights(a).weights, alpha_to_weights(b).weights) <=
          1e-12);
}

TEST_CASE("weight invariants hold on random alphas") {
    Panel a = oracles::make_random_panel(50, 20, 17, 0.08);
    WeightMatrix w = alpha_to_weights(a);
    for (std::size_t t = 0; t < 50; ++t) {
        double net = 0.0, gross = 0.0;
        for (std::size_t i = 0; i < 20; ++i) {
            net += w.weights.at(t, i);
            gross += std::abs(w.weights.at(t, i));
        }
        CHECK(std::abs(net) <= 1e-10);
        if (gross != 0.0) CHECK(std::abs(gross - 1.0) <= 1e-10);
    }
}

TEST_CASE("simulate rejects non-neutral weights") {
    MarketData m = hand_market();
    Panel w(m.calendar, m.universe, 0.0);
    w.set(1, 0, 1.0); // long-only book
    CHECK_THROWS_AS(simulate(WeightMatrix{w}, m, 1, 1e6), DataError);
}

TEST_CASE("simulate two-asset hand P&L") {
    // w = [-0.5, 0.5] on day 1, next-day returns [-0.01, 0.03], book 1e6
    const std::vector<std::vector<double>> closes = {{100, 100}, {100, 100}, {99, 103}};
    Panel close = row_panel(closes);
    MarketData m(close.calendar(), close.universe());
    m.close = m.open = m.vwap = close;
    m.high = m.low = close;
    m.volume = Panel(close.calendar(), close.universe(), 10.0);
    m.returns = derive_returns(close);

    Panel w(close.calendar(), close.universe(), 0.0);
    w.set(1, 0, -0.5);
    w.set(1, 1, 0.5);
    w.set(2, 0, -0.5);
    w.set(2, 1, 0.5);
    SimResult sim = simulate(WeightMatrix{w}, m, 1, 1e6);
    CHECK(sim.daily_pnl[2] == doctest::Approx(1e6 * (0.005 + 0.015)).epsilon(1e-12));
    CHECK(sim.daily_traded_dollars[2] == 0.0); // identical weights day over day
}

TEST_CASE("P&L antisymmetry under weight negation") {
    MarketData m = generate_synthetic(23, 60, 15);
    Panel alpha = oracles::make_random_panel(60, 15, 9, 0.0);
    // reuse market calendar/universe for the weights
    Panel values(m.calendar, m.universe, 0.0);
    for (std::size_t t = 0; t < 60; ++t)
        for (std::size_t i = 0; i < 15; ++i) values.set(t, i, alpha.at(t, i));
    WeightMatrix w = alpha_to_weights(values);
    Panel neg(m.calendar, m.universe, 0.0);
    for (std::size_t t = 0; t < 60; ++t)
        for (std::size_t i = 0; i < 15; ++i) neg.set(t, i, -w.weights.at(t, i));
    SimResult a = simulate(w, m, 1, 2e6);
    SimResult b = simulate(WeightMatrix{neg}, m, 1, 2e6);
    for (std::size_t t = 0; t < 60; ++t) {
        if (std::isnan(a.daily_pnl[t])) {
            CHECK(std::isnan(b.daily_pnl[t]));
            continue;
        }
        CHECK(a.daily_pnl[t] == -b.daily_pnl[t]); // exact
        CHECK(a.daily_traded_dollars[t] == b.daily_traded_dollars[t]);
    }
}

TEST_CASE("turnover on an alternating weight path matches hand computation") {
    MarketData m = hand_market();
    Panel w(m.calendar, m.universe, 0.0);
    const double wa[3] = {-0.5, 0.0, 0.5};
    const double wb[3] = {0.0, -0.5, 0.5};
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t i = 0; i < 3; ++i) w.set(t, i, (t % 2 == 0 ? wa : wb)[i]);
    const double book = 1e6;
    SimResult sim = simulate(WeightMatrix{w}, m, 1, book);
    CHECK(std::abs(sim.daily_traded_dollars[0] - book * 1.0) <= 1e-12 * book);
    for (std::size_t t = 1; t < 5; ++t) {
        // |Δw| = |0.5| + |0.5| + 0 = 1 between the two fixed portfolios
        CHECK(std::abs(sim.daily_traded_dollars[t] - book * 1.0) <= 1e-12 * book);
    }
    AlphaStats s = compute_stats(sim);
    CHECK(std::abs(s.turnover - 1.0) <= 1e-12);
    CHECK(std::abs(s.holding_period - 1.0) <= 1e-12);
}

TEST_CASE("statistics on the 5-day 3-asset hand scenario") {
    MarketData m = hand_market();
    Panel alpha = row_panel({{1, 2, 3}, {3, 2, 1}, {1, 3, 2}, {2, 2, 2}, {1, 2, 3}});
    // rebuild on the market's calendar/universe
    Panel values(m.calendar, m.universe, 0.0);
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t i = 0; i < 3; ++i) values.set(t, i, alpha.at(t, i));
    const double book = 1e6;
    SimResult sim = simulate(alpha_to_weights(values), m, 1, book);
    AlphaStats s = compute_stats(sim);

    // Independent hand computation. Weights per day:
    // d0 [-0.5,0,0.5]; d1 [0.5,0,-0.5]; d2 [-0.5,0.5,0]; d3 zeros; d4 [-0.5,0,0.5]
    const double r1[3] = {102.0 / 100 - 1, 49.0 / 50 - 1, 202.0 / 200 - 1};
    const double r2[3] = {101.0 / 102 - 1, 50.0 / 49 - 1, 200.0 / 202 - 1};
    const double r3[3] = {103.0 / 101 - 1, 51.0 / 50 - 1, 198.0 / 200 - 1};
    const double pnl1 = book * (-0.5 * r1[0] + 0.5 * r1[2]);
    const double pnl2 = book * (0.5 * r2[0] - 0.5 * r2[2]);
    const double pnl3 = book * (-0.5 * r3[0] + 0.5 * r3[1]);
    const double pnl4 = 0.0; // flat book entering day 4
    const double pnl[4] = {pnl1, pnl2, pnl3, pnl4};
    double P = 0;
    for (double v : pnl) P += v;
    P /= 4;
    double V = 0;
    for (double v : pnl) V += (v - P) * (v - P);
    V = std::sqrt(V / 3);

    // traded dollars: d0 gross 1; d1 |Δw| = 1+0+1 = 2; d2 = 1+0.5+0.5 = 2;
    // d3 = 0.5+0.5+0 = 1; d4 = 0.5+0+0.5 = 1 (re-entering from flat)
    const double dollars[5] = {book, 2 * book, 2 * book, book, book};
    double D = 0;
    for (double v : dollars) D += v;
    D /= 5;

    const double shares[5] = {
        book * (0.5 / 100 + 0.5 / 200),
        book * (1.0 / 102 + 1.0 / 202),
        book * (1.0 / 101 + 0.5 / 50 + 0.5 / 200),
        book * (0.5 / 103 + 0.5 / 51),
        book * (0.5 / 104 + 0.5 / 200),
    };
    double Q = 0;
    for (double v : shares) Q += v;
    Q /= 5;

    CHECK(std::abs(s.sharpe - std::sqrt(252.0) * P / V) <= 1e-10);
    CHECK(std::abs(s.turnover - D / book) <= 1e-10);
    CHECK(std::abs(s.cents_per_share - 100.0 * P / Q) <= 1e-10);
    CHECK(std::abs(s.daily_vol - V / book) <= 1e-10);
    CHECK(std::abs(s.ann_return - 252.0 * P / book) <= 1e-10);
}

TEST_CASE("compute_stats degenerate cases") {
    SUBCASE("constant pnl gives NaN Sharpe") {
        SimResult sim;
        sim.book_size = 1e6;
        sim.daily_pnl = {100.0, 100.0, 100.0};
        sim.daily_traded_dollars = {1e6, 1e6, 1e6};
        sim.daily_traded_shares = {10.0, 10.0, 10.0};
        AlphaStats s = compute_stats(sim);
        CHECK(std::isnan(s.sharpe));
        CHECK(s.turnover == doctest::Approx(1.0));
        CHECK(s.holding_period == doctest::Approx(1.0));
    }
    SUBCASE("P/V = 0.1 gives S = 0.1 * sqrt(252)") {
        SimResult sim;
        sim.book_size = 1e6;
        // mean 1000, sample stdev 10000 -> P/V = 0.1
        sim.daily_pnl = {11000.0, -9000.0, 1000.0};
        sim.daily_traded_dollars = {1e6, 1e6, 1e6};
        sim.daily_traded_shares = {10.0, 10.0, 10.0};
        AlphaStats s = compute_stats(sim);
        CHECK(std::abs(s.sharpe - 0.1 * std::sqrt(252.0)) <= 1e-9);
    }
    SUBCASE("fewer than 2 valid days throws") {
        SimResult sim;
        sim.book_size = 1e6;
        sim.daily_pnl = {kNaN, 5.0};
        sim.daily_traded_dollars = {kNaN, 1e6};
        sim.daily_traded_shares = {kNaN, 10.0};
        CHECK_THROWS_AS(compute_stats(sim), DataError);
    }
}

TEST_CASE("alpha_corr_matrix basics and oracle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> norm;
    std::vector<double> a(40), b(40), c(40);
    for (int t = 0; t < 40; ++t) {
        a[t] = norm(rng);
        b[t] = norm(rng);
        c[t] = norm(rng);
    }
    SUBCASE("identical and negated series") {
        AlphaCorrMatrix psi = alpha_corr_matrix({{1, a}, {2, a}});
        CHECK(psi.psi[0][1] == doctest::Approx(1.0).epsilon(1e-12));
        std::vector<double> neg(40);
        for (int t = 0; t < 40; ++t) neg[t] = -a[t];
        AlphaCorrMatrix psi2 = alpha_corr_matrix({{1, a}, {2, neg}});
        CHECK(psi2.psi[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("pairwise oracle on 3 series") {
        AlphaCorrMatrix psi = alpha_corr_matrix({{1, a}, {2, b}, {3, c}});
        auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
            double mx = 0, my = 0;
            for (std::size_t t = 0; t < x.size(); ++t) { mx += x[t]; my += y[t]; }
            mx /= x.size();
            my /= y.size();
            double sxx = 0, syy = 0, sxy = 0;
            for (std::size_t t = 0; t < x.size(); ++t) {
                sxx += (x[t] - mx) * (x[t] - mx);
                syy += (y[t] - my) * (y[t] - my);
                sxy += (x[t] - mx) * (y[t] - my);
            }
            return sxy / std::sqrt(sxx * syy);
        };
        CHECK(std::abs(psi.psi[0][1] - corr(a, b)) <= 1e-12);
        CHECK(std::abs(psi.psi[0][2] - corr(a, c)) <= 1e-12);
        CHECK(std::abs(psi.psi[1][2] - corr(b, c)) <= 1e-12);
        for (int i = 0; i < 3; ++i) CHECK(psi.psi[i][i] == 1.0);
    }
    SUBCASE("NaN days restrict to the common window") {
        std::vector<double> a2 = a, b2 = b;
        a2[0] = kNaN;
        b2[39] = kNaN;
        AlphaCorrMatrix psi = alpha_corr_matrix({{1, a2}, {2, b2}});
        std::vector<double> at(a.begin() + 1, a.end() - 1), bt(b.begin() + 1, b.end() - 1);
        AlphaCorrMatrix ref = alpha_corr_matrix({{1, at}, {2, bt}});
        CHECK(std::abs(psi.psi[0][1] - ref.psi[0][1]) <= 1e-14);
    }
}

TEST_CASE("CSV exports are stable") {
    std::map<int, AlphaStats> stats;
    AlphaStats s;
    s.sharpe = 1.5;
    s.turnover = 0.5;
    s.holding_period = 2.0;
    s.cents_per_share = 0.4;
    s.daily_vol = 0.001;
    s.ann_return = 0.05;
    s.delay_class = 0;
    stats[42] = s;
    const std::string csv = stats_to_csv(stats);
    CHECK(csv.find("id,S,T,holding_period,C,sigma,ann_return,delay") == 0);
    CHECK(csv.find("42,1.5,0.5,2,0.4,0.001,0.05,0") != std::string::npos);

    AlphaCorrMatrix corr;
    corr.ids = {1, 2};
    corr.psi = {{1.0, 0.25}, {0.25, 1.0}};
    corr.sigma = {0.1, 0.2};
    const std::string ccsv = corr_to_csv(corr);
    CHECK(ccsv == "id,1,2\n1,1,0.25\n2,0.25,1\n");
}
