#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alphaforge/panel.hpp"

namespace alphaforge {

enum class IndustryLevel { Sector, Industry, Subindustry };

const char* to_string(IndustryLevel level);
std::optional<IndustryLevel> industry_level_from_string(const std::string& name);

/// Per-level asset -> group-id mapping. Levels are independent; no nesting
/// is enforced. A provided level must cover every universe asset.
class IndustryMap {
public:
    IndustryMap() = default;

    bool has_level(IndustryLevel level) const { return groups_.count(level) > 0; }
    void set_level(IndustryLevel level, std::vector<std::string> group_per_asset);

    /// Group id per universe column; throws DataError if the level is absent.
    const std::vector<std::string>& level(IndustryLevel level) const;

    std::vector<IndustryLevel> levels() const;

private:
    std::map<IndustryLevel, std::vector<std::string>> groups_;
};

/// All daily input panels on one shared calendar/universe. Immutable after
/// construction; safe for concurrent reads.
struct MarketData {
    CalendarPtr calendar;
    UniversePtr universe;

    Panel open, high, low, close, volume, vwap;
    Panel cap;     // valid only if has_cap
    Panel returns; // close-to-close daily fractions, row 0 NaN when derived
    bool has_cap = false;

    IndustryMap industry;

    MarketData(CalendarPtr cal, UniversePtr uni);

    /// Throws DataError on any violated invariant (price ordering, negative
    /// volume, non-positive cap, shape mismatches).
    void check_invariants() const;

    /// First t days of every panel, same universe.
    MarketData head(std::size_t t) const;
};

struct LoadOptions {
    /// Receives human-readable warnings (e.g. vwap fallback). Defaults to stderr.
    std::function<void(const std::string&)> warn;
};

/// Loads a CSV with header
///   date,ticker,open,high,low,close,volume[,vwap][,cap][,sector][,industry][,subindustry]
/// onto the union calendar/universe found in the file. Missing cells are NaN.
/// If vwap is absent it is filled with (open+high+low+close)/4 and a warning
/// is emitted. Returns are derived from close. Prices are assumed to be
/// already adjusted for splits and dividends.
MarketData load_market_csv(const std::string& path, const LoadOptions& options = {});

/// Deterministic synthetic market: per-asset geometric random walks with
/// bracketing high/low, log-normal volume, round-robin industry groups.
MarketData generate_synthetic(std::uint64_t seed, int days, int assets, int groups_per_level = 4);

/// returns[t][i] = close[t][i]/close[t-1][i] - 1; row 0 all NaN.
Panel derive_returns(const Panel& close);

/// adv{d}: trailing d-day mean of volume*vwap, NaN during warmup or when the
/// window contains a NaN.
Panel derive_adv(const MarketData& market, int d);

} // namespace alphaforge
