#include <doctest.h>

#include <cmath>

#include "alphaforge/kernels.hpp"
#include "oracles.hpp"

using namespace alphaforge;
namespace ops = alphaforge::ops;
using oracles::kNaN;
using oracles::make_random_panel;
using oracles::max_abs_diff;

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

Panel col_panel(const std::vector<double>& column) {
    std::vector<std::vector<double>> rows;
    for (double v : column) rows.push_back({v});
    return row_panel(rows);
}

} // namespace

TEST_CASE("elementwise unary semantics") {
    Panel x = row_panel({{-2, 0, 3}});
    Panel s = ops::elementwise_unary(ops::UnaryKind::Sign, x);
    CHECK(s.at(0, 0) == -1);
    CHECK(s.at(0, 1) == 0);
    CHECK(s.at(0, 2) == 1);

    Panel l = ops::elementwise_unary(ops::UnaryKind::Log, row_panel({{1, -1, 0}}));
    CHECK(l.at(0, 0) == 0.0);
    CHECK(std::isnan(l.at(0, 1)));
    CHECK(std::isnan(l.at(0, 2)));

    Panel a = ops::elementwise_unary(ops::UnaryKind::Abs, row_panel({{kNaN}}));
    CHECK(std::isnan(a.at(0, 0)));
}

TEST_CASE("elementwise binary semantics") {
    Panel q = ops::elementwise_binary(ops::BinaryKind::Div, row_panel({{1, 2}}),
                                      row_panel({{0, 2}}));
    CHECK(std::isnan(q.at(0, 0)));
    CHECK(q.at(0, 1) == 1.0);

    Panel p = ops::elementwise_binary(ops::BinaryKind::Pow, row_panel({{4, -4}}), 0.5);
    CHECK(p.at(0, 0) == doctest::Approx(2.0));
    CHECK(std::isnan(p.at(0, 1)));

    Panel m = ops::elementwise_binary(ops::BinaryKind::Max, row_panel({{1, 5}}),
                                      row_panel({{3, 2}}));
    CHECK(m.at(0, 0) == 3);
    CHECK(m.at(0, 1) == 5);
}

TEST_CASE("compare produces numeric booleans with NaN propagation") {
    Panel c = ops::compare(ops::CompareKind::Lt, row_panel({{2, 5, kNaN}}),
                           row_panel({{3, 4, 1}}));
    CHECK(c.at(0, 0) == 1.0);
    CHECK(c.at(0, 1) == 0.0);
    CHECK(std::isnan(c.at(0, 2)));

    Panel e = ops::compare(ops::CompareKind::Eq, row_panel({{kNaN}}), row_panel({{kNaN}}));
    CHECK(std::isnan(e.at(0, 0)));
}

TEST_CASE("logical_or truth dominance") {
    Panel r = ops::logical_or(row_panel({{1, 0, 0, 1}}), row_panel({{0, 0, kNaN, kNaN}}));
    CHECK(r.at(0, 0) == 1.0);
    CHECK(r.at(0, 1) == 0.0);
    CHECK(std::isnan(r.at(0, 2)));
    CHECK(r.at(0, 3) == 1.0);
}

TEST_CASE("ternary_select per cell") {
    Panel r = ops::ternary_select(row_panel({{1, 0, kNaN}}), row_panel({{7, 7, 7}}),
                                  row_panel({{9, 9, 9}}));
    CHECK(r.at(0, 0) == 7);
    CHECK(r.at(0, 1) == 9);
    CHECK(std::isnan(r.at(0, 2)));
}

TEST_CASE("cs_rank conventions") {
    Panel r = ops::cs_rank(row_panel({{30, 10, 20}}));
    CHECK(r.at(0, 0) == 1.0);
    CHECK(r.at(0, 1) == 0.0);
    CHECK(r.at(0, 2) == 0.5);

    Panel ties = ops::cs_rank(row_panel({{5, 5}}));
    CHECK(ties.at(0, 0) == 0.5);
    CHECK(ties.at(0, 1) == 0.5);

    Panel withnan = ops::cs_rank(row_panel({{1, kNaN, 3}}));
    CHECK(withnan.at(0, 0) == 0.0);
    CHECK(std::isnan(withnan.at(0, 1)));
    CHECK(withnan.at(0, 2) == 1.0);

    Panel single = ops::cs_rank(row_panel({{42, kNaN}}));
    CHECK(single.at(0, 0) == 0.5);
}

TEST_CASE("cs_rank invariant under increasing transforms") {
    Panel x = make_random_panel(40, 15, 7, 0.05);
    Panel ex(x.calendar(), x.universe(), 0.0);
    Panel affine(x.calendar(), x.universe(), 0.0);
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i) {
            ex.set(t, i, std::exp(x.at(t, i)));
            affine.set(t, i, 3.0 * x.at(t, i) + 1.0);
        }
    CHECK(max_abs_diff(ops::cs_rank(x), ops::cs_rank(ex)) <= 1e-12);
    CHECK(max_abs_diff(ops::cs_rank(x), ops::cs_rank(affine)) <= 1e-12);
}

TEST_CASE("cs_scale") {
    Panel r = ops::cs_scale(row_panel({{1, -1, 2}}));
    CHECK(r.at(0, 0) == doctest::Approx(0.25));
    CHECK(r.at(0, 1) == doctest::Approx(-0.25));
    CHECK(r.at(0, 2) == doctest::Approx(0.5));

    Panel z = ops::cs_scale(row_panel({{0, 0}}));
    CHECK(z.at(0, 0) == 0.0);
    CHECK(z.at(0, 1) == 0.0);

    SUBCASE("idempotent and hits the target gross") {
        Panel x = make_random_panel(30, 10, 3, 0.05);
        Panel once = ops::cs_scale(x, 2.5);
        for (std::size_t t = 0; t < once.rows(); ++t) {
            double gross = 0.0;
            bool any = false;
            for (std::size_t i = 0; i < once.cols(); ++i)
                if (!std::isnan(once.at(t, i))) { gross += std::abs(once.at(t, i)); any = true; }
            if (any) CHECK(std::abs(gross - 2.5) <= 1e-12);
        }
        CHECK(max_abs_diff(ops::cs_scale(x), ops::cs_scale(ops::cs_scale(x))) <= 1e-12);
    }
}

TEST_CASE("cs_indneutralize demeans per group") {
    Panel x = row_panel({{1, 3, 7}});
    ops::GroupVector g{{0, 0, 1}, 2};
    Panel r = ops::cs_indneutralize(x, g);
    CHECK(r.at(0, 0) == doctest::Approx(-1));
    CHECK(r.at(0, 1) == doctest::Approx(1));
    CHECK(r.at(0, 2) == doctest::Approx(0)); // singleton group

    SUBCASE("group means vanish; idempotent") {
        Panel y = make_random_panel(25, 12, 5, 0.05);
        ops::GroupVector gv{{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
        Panel n1 = ops::cs_indneutralize(y, gv);
        for (std::size_t t = 0; t < n1.rows(); ++t)
            for (int grp = 0; grp < 3; ++grp) {
                double sum = 0.0;
                int cnt = 0;
                for (std::size_t i = 0; i < n1.cols(); ++i)
                    if (gv.group[i] == grp && !std::isnan(n1.at(t, i))) {
                        sum += n1.at(t, i);
                        ++cnt;
                    }
                if (cnt > 0) CHECK(std::abs(sum / cnt) <= 1e-12);
            }
        CHECK(max_abs_diff(n1, ops::cs_indneutralize(n1, gv)) <= 1e-12);
    }
}

TEST_CASE("ts_delay and ts_delta") {
    Panel x = col_panel({1, 2, 3});
    Panel d1 = ops::ts_delay(x, 1);
    CHECK(std::isnan(d1.at(0, 0)));
    CHECK(d1.at(1, 0) == 1);
    CHECK(d1.at(2, 0) == 2);
    CHECK(max_abs_diff(ops::ts_delay(x, 0), x) == 0.0);

    Panel sq = col_panel({1, 4, 9});
    Panel dl = ops::ts_delta(sq, 1);
    CHECK(std::isnan(dl.at(0, 0)));
    CHECK(dl.at(1, 0) == 3);
    CHECK(dl.at(2, 0) == 5);

    SUBCASE("delta equals x minus delay exactly") {
        Panel r = make_random_panel(60, 8, 11, 0.05);
        Panel lhs = ops::ts_delta(r, 4);
        Panel delayed = ops::ts_delay(r, 4);
        Panel rhs = ops::elementwise_binary(ops::BinaryKind::Sub, r, delayed);
        CHECK(max_abs_diff(lhs, rhs) == 0.0);
    }
}

TEST_CASE("windowed kernels: hand values") {
    SUBCASE("sum d=2") {
        Panel s = ops::ts_sum(col_panel({1, 2, 3}), 2);
        CHECK(std::isnan(s.at(0, 0)));
        CHECK(s.at(1, 0) == 3);
        CHECK(s.at(2, 0) == 5);
    }
    SUBCASE("product window containing zero") {
        CHECK(ops::ts_product(col_panel({2, 0, 3}), 3).at(2, 0) == 0.0);
    }
    SUBCASE("stddev of constant window is 0") {
        CHECK(ops::ts_stddev(col_panel({5, 5, 5}), 3).at(2, 0) == 0.0);
    }
    SUBCASE("min/max basics") {
        CHECK(ops::ts_min(col_panel({3, 1, 2}), 3).at(2, 0) == 1);
        Panel x = make_random_panel(30, 5, 21);
        CHECK(max_abs_diff(ops::ts_min(x, 1), x) == 0.0);
        Panel mn = ops::ts_min(x, 6), mx = ops::ts_max(x, 6);
        for (std::size_t t = 5; t < 30; ++t)
            for (std::size_t i = 0; i < 5; ++i) CHECK(mn.at(t, i) <= mx.at(t, i));
    }
    SUBCASE("argmax conventions") {
        CHECK(ops::ts_argmax(col_panel({5, 9, 7}), 3).at(2, 0) == 1);
        CHECK(ops::ts_argmax(col_panel({1, 2, 3}), 3).at(2, 0) == 0);
        CHECK(ops::ts_argmax(col_panel({4, 4, 4}), 3).at(2, 0) == 0); // most recent tie
        CHECK(ops::ts_argmin(col_panel({1, 0, 2}), 3).at(2, 0) == 1);
    }
    SUBCASE("ts_rank endpoints") {
        CHECK(ops::ts_rank(col_panel({1, 2, 3}), 3).at(2, 0) == 1.0);
        CHECK(ops::ts_rank(col_panel({3, 2, 1}), 3).at(2, 0) == 0.0);
    }
    SUBCASE("decay_linear") {
        CHECK(ops::decay_linear(col_panel({1, 2, 3}), 3).at(2, 0) ==
              doctest::Approx(14.0 / 6.0).epsilon(1e-12));
        CHECK(ops::decay_linear(col_panel({7, 7, 7}), 3).at(2, 0) == doctest::Approx(7.0));
        Panel x = make_random_panel(20, 4, 31);
        CHECK(max_abs_diff(ops::decay_linear(x, 1), x) == 0.0);
    }
    SUBCASE("full-window NaN rule") {
        Panel s = ops::ts_sum(col_panel({1, kNaN, 3, 4}), 2);
        CHECK(std::isnan(s.at(1, 0)));
        CHECK(std::isnan(s.at(2, 0)));
        CHECK(s.at(3, 0) == 7);
    }
}

TEST_CASE("ts_correlation semantics") {
    Panel x = make_random_panel(50, 6, 41);
    SUBCASE("self correlation is 1") {
        Panel c = ops::ts_correlation(x, x, 10, 1e-12);
        for (std::size_t t = 9; t < 50; ++t)
            for (std::size_t i = 0; i < 6; ++i)
                CHECK(c.at(t, i) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("constant window is NaN") {
        Panel k(x.calendar(), x.universe(), 3.0);
        Panel c = ops::ts_correlation(k, x, 10, 1e-12);
        for (std::size_t t = 9; t < 50; ++t) CHECK(std::isnan(c.at(t, 0)));
    }
    SUBCASE("range bound") {
        Panel y = make_random_panel(50, 6, 42);
        Panel c = ops::ts_correlation(x, y, 8, 1e-12);
        for (std::size_t t = 0; t < 50; ++t)
            for (std::size_t i = 0; i < 6; ++i) {
                const double v = c.at(t, i);
                if (!std::isnan(v)) CHECK((v >= -1.0 && v <= 1.0));
            }
    }
}

TEST_CASE("signedpower") {
    Panel r = ops::signedpower(row_panel({{-2, 3, 0}}), 2.0);
    CHECK(r.at(0, 0) == doctest::Approx(-4.0));
    CHECK(r.at(0, 1) == doctest::Approx(9.0));
    CHECK(r.at(0, 2) == 0.0);
}

TEST_CASE("oracle equivalence on random NaN-sprinkled panels") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Panel x = make_random_panel(120, 20, seed, 0.05);
        Panel y = make_random_panel(120, 20, seed + 1000, 0.05);
        const int d = 2 + static_cast<int>(seed % 7);

        CHECK(max_abs_diff(ops::ts_sum(x, d), oracles::ref_ts_sum(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_product(x, d), oracles::ref_ts_product(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_stddev(x, d), oracles::ref_ts_stddev(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_min(x, d), oracles::ref_ts_min(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_max(x, d), oracles::ref_ts_max(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_argmax(x, d), oracles::ref_ts_argmax(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_argmin(x, d), oracles::ref_ts_argmin(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_rank(x, d), oracles::ref_ts_rank(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::decay_linear(x, d), oracles::ref_decay_linear(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_delay(x, d), oracles::ref_ts_delay(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_delta(x, d), oracles::ref_ts_delta(x, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_correlation(x, y, d, 1e-12),
                           oracles::ref_ts_correlation(x, y, d)) <= 1e-10);
        CHECK(max_abs_diff(ops::ts_covariance(x, y, d), oracles::ref_ts_covariance(x, y, d)) <=
              1e-10);
        CHECK(max_abs_diff(ops::cs_rank(x), oracles::ref_cs_rank(x)) <= 1e-10);
        CHECK(max_abs_diff(ops::cs_scale(x, 1.5), oracles::ref_cs_scale(x, 1.5)) <= 1e-10);
    }
}

TEST_CASE("no lookahead: perturbing future rows leaves the prefix unchanged") {
    Panel x = make_random_panel(80, 10, 77, 0.05);
    Panel y = make_random_panel(80, 10, 78, 0.05);
    Panel x2 = x, y2 = y;
    for (std::size_t t = 60; t < 80; ++t)
        for (std::size_t i = 0; i < 10; ++i) {
            x2.set(t, i, 1e6 + static_cast<double>(t * i));
            y2.set(t, i, -1e6);
        }
    auto prefix_equal = [](const Panel& a, const Panel& b, std::size_t rows) {
        return max_abs_diff(a.head(rows), b.head(rows)) == 0.0;
    };
    CHECK(prefix_equal(ops::ts_sum(x, 5), ops::ts_sum(x2, 5), 60));
    CHECK(prefix_equal(ops::ts_rank(x, 7), ops::ts_rank(x2, 7), 60));
    CHECK(prefix_equal(ops::decay_linear(x, 6), ops::decay_linear(x2, 6), 60));
    CHECK(prefix_equal(ops::ts_correlation(x, y, 8, 1e-12),
                       ops::ts_correlation(x2, y2, 8, 1e-12), 60));
    CHECK(prefix_equal(ops::cs_rank(x), ops::cs_rank(x2), 60));
    CHECK(prefix_equal(ops::ts_argmax(x, 9), ops::ts_argmax(x2, 9), 60));
}
