#include "alphaforge/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace alphaforge {

namespace {

const double kNaN = std::nan("");

} // namespace

const char* to_string(IndustryLevel level) {
    switch (level) {
        case IndustryLevel::Sector: return "sector";
        case IndustryLevel::Industry: return "industry";
        case IndustryLevel::Subindustry: return "subindustry";
    }
    return "?";
}

std::optional<IndustryLevel> industry_level_from_string(const std::string& name) {
    if (name == "sector") return IndustryLevel::Sector;
    if (name == "industry") return IndustryLevel::Industry;
    if (name == "subindustry") return IndustryLevel::Subindustry;
    return std::nullopt;
}

void IndustryMap::set_level(IndustryLevel level, std::vector<std::string> group_per_asset) {
    groups_[level] = std::move(group_per_asset);
}

const std::vector<std::string>& IndustryMap::level(IndustryLevel level) const {
    auto it = groups_.find(level);
    if (it == groups_.end())
        throw DataError(std::string("industry level '") + to_string(level) + "' not available");
    return it->second;
}

std::vector<IndustryLevel> IndustryMap::levels() const {
    std::vector<IndustryLevel> out;
    for (const auto& [level, _] : groups_) out.push_back(level);
    return out;
}

MarketData::MarketData(CalendarPtr cal, UniversePtr uni)
    : calendar(cal),
      universe(uni),
      open(cal, uni),
      high(cal, uni),
      low(cal, uni),
      close(cal, uni),
      volume(cal, uni),
      vwap(cal, uni),
      cap(cal, uni),
      returns(cal, uni) {}

void MarketData::check_invariants() const {
    const std::size_t T = calendar->size();
    const std::size_t N = universe->size();
    const Panel* panels[] = {&open, &high, &low, &close, &volume, &vwap, &cap, &returns};
    for (const Panel* p : panels) {
        if (p->rows() != T || p->cols() != N)
            throw DataError("market data panel shape mismatch");
        if (!p->all_finite_or_nan())
            throw DataError("market data panel contains infinities");
    }
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            const double o = open.at(t, i), h = high.at(t, i), l = low.at(t, i),
                         c = close.at(t, i), w = vwap.at(t, i), v = volume.at(t, i);
            auto where = [&] {
                return " at (" + (*calendar)[t] + ", " + (*universe)[i] + ")";
            };
            if (!std::isnan(h) && !std::isnan(l) && h < l)
                throw DataError("high < low" + where());
            if (!std::isnan(o) && !std::isnan(l) && o < l)
                throw DataError("open < low" + where());
            if (!std::isnan(o) && !std::isnan(h) && o > h)
                throw DataError("open > high" + where());
            if (!std::isnan(c) && !std::isnan(l) && c < l)
                throw DataError("close < low" + where());
            if (!std::isnan(c) && !std::isnan(h) && c > h)
                throw DataError("close > high" + where());
            if (!std::isnan(w) && !std::isnan(l) && w < l)
                throw DataError("vwap < low" + where());
            if (!std::isnan(w) && !std::isnan(h) && w > h)
                throw DataError("vwap > high" + where());
            if (!std::isnan(v) && v < 0) throw DataError("volume < 0" + where());
            if (has_cap && !std::isnan(cap.at(t, i)) && cap.at(t, i) <= 0)
                throw DataError("cap <= 0" + where());
        }
    }
    for (IndustryLevel level : industry.levels()) {
        if (industry.level(level).size() != N)
            throw DataError(std::string("industry level '") + to_string(level) +
                            "' does not cover the universe");
    }
}

MarketData MarketData::head(std::size_t t) const {
    Panel o = open.head(t);
    MarketData out(o.calendar(), universe);
    out.open = std::move(o);
    out.high = high.head(t);
    out.low = low.head(t);
    out.close = close.head(t);
    out.volume = volume.head(t);
    out.vwap = vwap.head(t);
    out.cap = cap.head(t);
    out.returns = returns.head(t);
    out.has_cap = has_cap;
    out.industry = industry;
    return out;
}

Panel derive_returns(const Panel& close) {
    Panel out(close.calendar(), close.universe());
    for (std::size_t i = 0; i < close.cols(); ++i) {
        for (std::size_t t = 1; t < close.rows(); ++t) {
            const double prev = close.at(t - 1, i);
            const double cur = close.at(t, i);
            double r = kNaN;
            if (!std::isnan(prev) && !std::isnan(cur) && prev != 0.0) r = cur / prev - 1.0;
            if (std::isinf(r)) r = kNaN;
            out.set(t, i, r);
        }
    }
    return out;
}

Panel derive_adv(const MarketData& market, int d) {
    if (d < 1) throw DataError("adv window must be >= 1");
    const Panel& vol = market.volume;
    const Panel& vwap = market.vwap;
    Panel out(vol.calendar(), vol.universe());
    const std::size_t T = vol.rows(), N = vol.cols();
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t t = static_cast<std::size_t>(d) - 1; t < T; ++t) {
            double sum = 0.0;
            bool valid = true;
            for (int k = 0; k < d; ++k) {
                const double dv = vol.at(t - k, i) * vwap.at(t - k, i);
                if (std::isnan(dv)) {
                    valid = false;
                    break;
                }
                sum += dv;
            }
            if (valid) {
                double m = sum / d;
                out.set(t, i, std::isinf(m) ? kNaN : m);
            }
        }
    }
    return out;
}

namespace {

struct CsvCell {
    std::string text;
    bool present() const { return !text.empty(); }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

double parse_number(const std::string& text, int line_no, const std::string& column) {
    if (text.empty()) return kNaN;
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw DataError("malformed number '" + text + "' in column '" + column + "' at line " +
                        std::to_string(line_no));
    return value;
}

} // namespace

MarketData load_market_csv(const std::string& path, const LoadOptions& options) {
    auto warn = options.warn ? options.warn
                             : [](const std::string& m) { std::cerr << "warning: " << m << "\n"; };

    std::ifstream in(path);
    if (!in) throw DataError("cannot open market data file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line) || header_line.empty())
        throw DataError("empty market data file: " + path);

    std::vector<std::string> header = split_csv_line(header_line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name = header[i];
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        col[name] = i;
    }
    for (const char* required : {"date", "ticker", "open", "high", "low", "close", "volume"}) {
        if (!col.count(required))
            throw DataError(std::string("missing required column '") + required + "' in " + path);
    }
    const bool has_vwap = col.count("vwap") > 0;
    const bool has_cap = col.count("cap") > 0;

    struct Row {
        int line_no;
        std::string date, ticker;
        double open, high, low, close, volume, vwap, cap;
        std::map<IndustryLevel, std::string> groups;
    };
    std::vector<Row> rows;
    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::string> dates, tickers;

    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw DataError("too few fields at line " + std::to_string(line_no));
        auto field = [&](const std::string& name) -> std::string {
            auto it = col.find(name);
            return it == col.end() ? std::string() : fields[it->second];
        };

        Row r;
        r.line_no = line_no;
        r.date = field("date");
        r.ticker = field("ticker");
        if (!valid_iso_date(r.date))
            throw DataError("malformed date '" + r.date + "' at line " + std::to_string(line_no));
        if (r.ticker.empty())
            throw DataError("empty ticker at line " + std::to_string(line_no));
        if (!seen.insert({r.date, r.ticker}).second)
            throw DataError("duplicate (date, ticker) = (" + r.date + ", " + r.ticker +
                            ") at line " + std::to_string(line_no));

        r.open = parse_number(field("open"), line_no, "open");
        r.high = parse_number(field("high"), line_no, "high");
        r.low = parse_number(field("low"), line_no, "low");
        r.close = parse_number(field("close"), line_no, "close");
        r.volume = parse_number(field("volume"), line_no, "volume");
        if (!std::isnan(r.volume) && r.volume < 0)
            throw DataError("negative volume in column 'volume' at line " +
                            std::to_string(line_no));
        r.vwap = has_vwap ? parse_number(field("vwap"), line_no, "vwap") : kNaN;
        r.cap = has_cap ? parse_number(field("cap"), line_no, "cap") : kNaN;

        for (const char* name : {"sector", "industry", "subindustry"}) {
            if (!col.count(name)) continue;
            const std::string g = field(name);
            if (!g.empty()) r.groups[*industry_level_from_string(name)] = g;
        }

        dates.insert(r.date);
        tickers.insert(r.ticker);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw DataError("no data rows in " + path);

    auto cal = std::make_shared<TradingCalendar>(
        std::vector<std::string>(dates.begin(), dates.end()));
    auto uni = std::make_shared<Universe>(std::vector<std::string>(tickers.begin(), tickers.end()));

    std::map<std::string, std::size_t> date_index, ticker_index;
    for (std::size_t t = 0; t < cal->size(); ++t) date_index[(*cal)[t]] = t;
    for (std::size_t i = 0; i < uni->size(); ++i) ticker_index[(*uni)[i]] = i;

    MarketData md(cal, uni);
    md.has_cap = has_cap;

    std::map<IndustryLevel, std::vector<std::string>> groups;
    for (const char* name : {"sector", "industry", "subindustry"}) {
        if (col.count(name))
            groups[*industry_level_from_string(name)] =
                std::vector<std::string>(uni->size());
    }

    if (!has_vwap)
        warn("vwap column absent; using (open+high+low+close)/4 as a fallback");

    for (const Row& r : rows) {
        const std::size_t t = date_index[r.date];
        const std::size_t i = ticker_index[r.ticker];
        md.open.set(t, i, r.open);
        md.high.set(t, i, r.high);
        md.low.set(t, i, r.low);
        md.close.set(t, i, r.close);
        md.volume.set(t, i, r.volume);
        double vwap = r.vwap;
        if (!has_vwap) vwap = (r.open + r.high + r.low + r.close) / 4.0;
        md.vwap.set(t, i, vwap);
        md.cap.set(t, i, r.cap);
        for (const auto& [level, g] : r.groups) {
            std::string& slot = groups[level][i];
            if (!slot.empty() && slot != g)
                throw DataError("conflicting " + std::string(to_string(level)) + " group for " +
                                r.ticker + " at line " + std::to_string(r.line_no));
            slot = g;
        }
    }

    for (auto& [level, per_asset] : groups) {
        bool any = false, all = true;
        for (const std::string& g : per_asset) (g.empty() ? all : any) = true;
        if (!any) continue; // column present but never populated
        if (!all)
            throw DataError(std::string("industry level '") + to_string(level) +
                            "' does not cover every ticker");
        md.industry.set_level(level, per_asset);
    }

    md.returns = derive_returns(md.close);
    md.check_invariants();
    return md;
}

MarketData generate_synthetic(std::uint64_t seed, int days, int assets, int groups_per_level) {
    if (days < 1) throw DataError("generate_synthetic: days must be >= 1");
    if (assets < 2) throw DataError("generate_synthetic: assets must be >= 2");
    if (groups_per_level < 1) throw DataError("generate_synthetic: groups_per_level must be >= 1");

    std::vector<std::string> dates(days);
    {
        // Synthetic weekday-free daily calendar starting 2018-01-01.
        int y = 2018, m = 1, d = 0;
        static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        for (int t = 0; t < days; ++t) {
            ++d;
            int md = mdays[m - 1] + ((m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) ? 1 : 0);
            if (d > md) {
                d = 1;
                if (++m > 12) {
                    m = 1;
                    ++y;
                }
            }
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
            dates[t] = buf;
        }
    }
    std::vector<std::string> names(assets);
    for (int i = 0; i < assets; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "A%04d", i);
        names[i] = buf;
    }
    auto cal = std::make_shared<TradingCalendar>(std::move(dates));
    auto uni = std::make_shared<Universe>(std::move(names));

    MarketData md(cal, uni);
    md.has_cap = true;

    std::mt19937_64 rng(seed);
    // Daily log-returns mix a diffusive component with occasional jumps; the
    // jumps keep cross-sectional price order reshuffling even after the panel
    // disperses, so rank-based windows rarely freeze.
    std::normal_distribution<double> ret_dist(0.0002, 0.015);
    std::normal_distribution<double> jump_dist(0.0, 0.05);
    constexpr double kJumpProb = 0.10;
    std::normal_distribution<double> gap_dist(0.0, 0.005);
    std::normal_distribution<double> pad_dist(0.0, 0.015);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Log-volume is a mean-reverting AR(1) around a common level: anti-persistent
    // day-to-day so trailing volume averages (and their ranks) churn instead of
    // drifting monotonically, while the marginal stays log-normal.
    constexpr double kVolPhi = -0.6;
    constexpr double kVolSigma = 0.8;
    std::normal_distribution<double> vol_innov(0.0, kVolSigma * std::sqrt(1.0 - kVolPhi * kVolPhi));
    std::normal_distribution<double> vol_start(0.0, kVolSigma);

    for (int i = 0; i < assets; ++i) {
        // Tight initial price packing: cross-sectional price order keeps
        // reshuffling daily instead of freezing into a static ladder.
        const double s0 = 80.0 + 40.0 * unif(rng);
        const double shares = std::exp(std::log(1e6) + (std::log(1e9) - std::log(1e6)) * unif(rng));
        double prev_close = s0;
        double vol_state = vol_start(rng);
        for (int t = 0; t < days; ++t) {
            const double open = prev_close * std::exp(gap_dist(rng));
            double log_ret = ret_dist(rng);
            if (unif(rng) < kJumpProb) log_ret += jump_dist(rng);
            const double close = (t == 0 ? s0 : prev_close) * std::exp(log_ret);
            const double high = std::max(open, close) * std::exp(std::abs(pad_dist(rng)));
            const double low = std::min(open, close) * std::exp(-std::abs(pad_dist(rng)));
            const double vwap = low + unif(rng) * (high - low);
            if (t > 0) vol_state = kVolPhi * vol_state + vol_innov(rng);
            const double volume = std::exp(std::log(1e6) + vol_state);
            md.open.set(t, i, open);
            md.high.set(t, i, high);
            md.low.set(t, i, low);
            md.close.set(t, i, close);
            md.vwap.set(t, i, vwap);
            md.volume.set(t, i, volume);
            md.cap.set(t, i, close * shares);
            prev_close = close;
        }
    }
    md.returns = derive_returns(md.close);

    const int g = groups_per_level;
    std::vector<std::string> sector(assets), industry(assets), subindustry(assets);
    for (int i = 0; i < assets; ++i) {
        sector[i] = "SEC" + std::to_string(i % g);
        industry[i] = "IND" + std::to_string((i / 2) % g);
        subindustry[i] = "SUB" + std::to_string((i / 3) % g);
    }
    md.industry.set_level(IndustryLevel::Sector, std::move(sector));
    md.industry.set_level(IndustryLevel::Industry, std::move(industry));
    md.industry.set_level(IndustryLevel::Subindustry, std::move(subindustry));

    md.check_invariants();
    return md;
}

} // namespace alphaforge
