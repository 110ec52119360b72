#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "alphaforge/market_data.hpp"
#include "oracles.hpp"

using namespace alphaforge;

namespace {

std::filesystem::path write_temp_csv(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

} // namespace

TEST_CASE("calendar rejects unordered or duplicate dates") {
    CHECK_THROWS_AS(TradingCalendar({"2020-01-02", "2020-01-01"}), DataError);
    CHECK_THROWS_AS(TradingCalendar({"2020-01-01", "2020-01-01"}), DataError);
    CHECK_NOTHROW(TradingCalendar({"2020-01-01", "2020-01-02"}));
}

TEST_CASE("universe rejects duplicate assets") {
    CHECK_THROWS_AS(Universe({"A", "A"}), DataError);
}

TEST_CASE("panel head truncates rows and keeps universe") {
    Panel p = oracles::make_random_panel(10, 3, 1);
    Panel h = p.head(4);
    CHECK(h.rows() == 4);
    CHECK(h.cols() == 3);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t i = 0; i < 3; ++i) CHECK(h.at(t, i) == p.at(t, i));
}

TEST_CASE("load_market_csv complete file yields dense panels") {
    const auto path = write_temp_csv("af_complete.csv",
        "date,ticker,open,high,low,close,volume,vwap\n"
        "2020-01-01,A,10,11,9,10.5,1000,10.2\n"
        "2020-01-01,B,20,22,19,21,2000,20.5\n"
        "2020-01-02,A,10.5,11.5,10,11,1100,10.8\n"
        "2020-01-02,B,21,23,20,22,2100,21.5\n");
    MarketData m = load_market_csv(path.string());
    CHECK(m.calendar->size() == 2);
    CHECK(m.universe->size() == 2);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t i = 0; i < 2; ++i) CHECK_FALSE(std::isnan(m.close.at(t, i)));
    CHECK(m.close.at(0, 0) == doctest::Approx(10.5));
    CHECK(std::isnan(m.returns.at(0, 0)));
    CHECK(m.returns.at(1, 1) == doctest::Approx(22.0 / 21.0 - 1.0));
}

TEST_CASE("load_market_csv missing ticker day becomes NaN") {
    const auto path = write_temp_csv("af_missing.csv",
        "date,ticker,open,high,low,close,volume,vwap\n"
        "2020-01-01,A,10,11,9,10.5,1000,10.2\n"
        "2020-01-01,B,20,22,19,21,2000,20.5\n"
        "2020-01-02,A,10.5,11.5,10,11,1100,10.8\n");
    MarketData m = load_market_csv(path.string());
    CHECK(std::isnan(m.close.at(1, 1)));
    CHECK(std::isnan(m.volume.at(1, 1)));
    CHECK_FALSE(std::isnan(m.close.at(1, 0)));
}

TEST_CASE("load_market_csv negative volume names the line") {
    const auto path = write_temp_csv("af_negvol.csv",
        "date,ticker,open,high,low,close,volume,vwap\n"
        "2020-01-01,A,10,11,9,10.5,-5,10.2\n");
    try {
        load_market_csv(path.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2") != std::string::npos); // line number
        CHECK(msg.find("volume") != std::string::npos);
    }
}

TEST_CASE("load_market_csv duplicate (date,ticker) is an error") {
    const auto path = write_temp_csv("af_dup.csv",
        "date,ticker,open,high,low,close,volume,vwap\n"
        "2020-01-01,A,10,11,9,10.5,100,10.2\n"
        "2020-01-01,A,10,11,9,10.5,100,10.2\n");
    CHECK_THROWS_AS(load_market_csv(path.string()), DataError);
}

TEST_CASE("load_market_csv vwap fallback warns and uses OHLC average") {
    const auto path = write_temp_csv("af_novwap.csv",
        "date,ticker,open,high,low,close,volume\n"
        "2020-01-01,A,10,12,8,10,100\n"
        "2020-01-02,A,10,12,8,10,100\n");
    int warnings = 0;
    LoadOptions opt;
    opt.warn = [&](const std::string&) { ++warnings; };
    MarketData m = load_market_csv(path.string(), opt);
    CHECK(warnings > 0);
    CHECK(m.vwap.at(0, 0) == doctest::Approx((10 + 12 + 8 + 10) / 4.0));
}

TEST_CASE("generate_synthetic determinism and invariants") {
    MarketData a = generate_synthetic(1, 10, 5, 2);
    MarketData b = generate_synthetic(1, 10, 5, 2);
    CHECK(a.close.values() == b.close.values());
    CHECK(a.volume.values() == b.volume.values());

    MarketData c = generate_synthetic(2, 10, 5, 2);
    CHECK(a.close.values() != c.close.values());

    for (std::size_t t = 0; t < a.close.rows(); ++t)
        for (std::size_t i = 0; i < a.close.cols(); ++i) {
            CHECK(a.high.at(t, i) >= std::max(a.open.at(t, i), a.close.at(t, i)));
            CHECK(a.low.at(t, i) <= std::min(a.open.at(t, i), a.close.at(t, i)));
            CHECK(a.volume.at(t, i) >= 0.0);
            CHECK(a.cap.at(t, i) > 0.0);
        }
    CHECK(a.has_cap);
    CHECK(a.industry.has_level(IndustryLevel::Sector));
    CHECK(a.industry.has_level(IndustryLevel::Industry));
    CHECK(a.industry.has_level(IndustryLevel::Subindustry));
    CHECK_NOTHROW(a.check_invariants());
}

TEST_CASE("derive_returns basics") {
    auto cal = std::make_shared<const TradingCalendar>(
        std::vector<std::string>{"d1", "d2", "d3"});
    auto uni = std::make_shared<const Universe>(std::vector<std::string>{"A", "B", "C"});
    Panel close(cal, uni, 0.0);
    // A: [100, 101, 102]; B: constant; C: NaN in the middle
    close.set(0, 0, 100); close.set(1, 0, 101); close.set(2, 0, 102);
    close.set(0, 1, 50); close.set(1, 1, 50); close.set(2, 1, 50);
    close.set(0, 2, 100); close.set(1, 2, oracles::kNaN); close.set(2, 2, 102);

    Panel r = derive_returns(close);
    CHECK(std::isnan(r.at(0, 0)));
    CHECK(r.at(1, 0) == doctest::Approx(0.01));
    CHECK(r.at(1, 1) == 0.0);
    CHECK(r.at(2, 1) == 0.0);
    CHECK(std::isnan(r.at(1, 2)));
    CHECK(std::isnan(r.at(2, 2)));
}

TEST_CASE("derive_returns reconstructs close by cumulating") {
    MarketData m = generate_synthetic(5, 50, 4);
    Panel r = derive_returns(m.close);
    for (std::size_t i = 0; i < 4; ++i) {
        double px = m.close.at(0, i);
        for (std::size_t t = 1; t < 50; ++t) {
            px *= 1.0 + r.at(t, i);
            CHECK(std::abs(px - m.close.at(t, i)) / m.close.at(t, i) < 1e-12);
        }
    }
}

TEST_CASE("derive_adv definition") {
    MarketData m = generate_synthetic(3, 12, 3);
    SUBCASE("d=1 equals volume*vwap") {
        Panel adv1 = derive_adv(m, 1);
        for (std::size_t t = 0; t < 12; ++t)
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(adv1.at(t, i) ==
                      doctest::Approx(m.volume.at(t, i) * m.vwap.at(t, i)).epsilon(1e-12));
    }
    SUBCASE("d=2 hand mean and warmup") {
        Panel adv2 = derive_adv(m, 2);
        CHECK(std::isnan(adv2.at(0, 0)));
        const double expect =
            (m.volume.at(0, 0) * m.vwap.at(0, 0) + m.volume.at(1, 0) * m.vwap.at(1, 0)) / 2.0;
        CHECK(adv2.at(1, 0) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("no infinities anywhere") {
        CHECK(derive_adv(m, 5).all_finite_or_nan());
    }
}
