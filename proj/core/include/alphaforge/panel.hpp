#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "alphaforge/errors.hpp"

namespace alphaforge {

/// Strictly increasing sequence of ISO-8601 trading dates.
class TradingCalendar {
public:
    explicit TradingCalendar(std::vector<std::string> dates);

    std::size_t size() const { return dates_.size(); }
    const std::string& operator[](std::size_t t) const { return dates_[t]; }
    const std::vector<std::string>& dates() const { return dates_; }

    bool operator==(const TradingCalendar& other) const { return dates_ == other.dates_; }

private:
    std::vector<std::string> dates_;
};

/// Ordered set of unique asset identifiers; its order is the canonical
/// column order of every Panel.
class Universe {
public:
    explicit Universe(std::vector<std::string> assets);

    std::size_t size() const { return assets_.size(); }
    const std::string& operator[](std::size_t i) const { return assets_[i]; }
    const std::vector<std::string>& assets() const { return assets_; }

    bool operator==(const Universe& other) const { return assets_ == other.assets_; }

private:
    std::vector<std::string> assets_;
};

using CalendarPtr = std::shared_ptr<const TradingCalendar>;
using UniversePtr = std::shared_ptr<const Universe>;

/// Dates x assets matrix of doubles; NaN marks missing. Values are never
/// +-inf: kernels coerce infinities to NaN. Treated as immutable once
/// handed out of a constructing function.
class Panel {
public:
    Panel(CalendarPtr calendar, UniversePtr universe, double fill = std::nan(""));
    Panel(CalendarPtr calendar, UniversePtr universe, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double at(std::size_t t, std::size_t i) const { return values_[t * cols_ + i]; }
    void set(std::size_t t, std::size_t i, double v) { values_[t * cols_ + i] = v; }

    const std::vector<double>& values() const { return values_; }
    const CalendarPtr& calendar() const { return calendar_; }
    const UniversePtr& universe() const { return universe_; }

    bool same_shape(const Panel& other) const;

    /// First t rows as a new Panel on a truncated calendar.
    Panel head(std::size_t t) const;

    /// True if every entry is finite or NaN (never +-inf).
    bool all_finite_or_nan() const;

    static Panel full(const CalendarPtr& cal, const UniversePtr& uni, double v) {
        return Panel(cal, uni, v);
    }

private:
    CalendarPtr calendar_;
    UniversePtr universe_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

} // namespace alphaforge
