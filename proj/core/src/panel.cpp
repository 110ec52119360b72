#include "alphaforge/panel.hpp"

#include <algorithm>

namespace alphaforge {

TradingCalendar::TradingCalendar(std::vector<std::string> dates) : dates_(std::move(dates)) {
    if (dates_.empty()) throw DataError("calendar must contain at least one date");
    for (std::size_t t = 1; t < dates_.size(); ++t) {
        if (!(dates_[t - 1] < dates_[t]))
            throw DataError("calendar dates must be strictly increasing: '" + dates_[t - 1] +
                            "' followed by '" + dates_[t] + "'");
    }
}

Universe::Universe(std::vector<std::string> assets) : assets_(std::move(assets)) {
    if (assets_.empty()) throw DataError("universe must contain at least one asset");
    std::vector<std::string> sorted = assets_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DataError("universe assets must be unique");
}

Panel::Panel(CalendarPtr calendar, UniversePtr universe, double fill)
    : calendar_(std::move(calendar)),
      universe_(std::move(universe)),
      rows_(calendar_->size()),
      cols_(universe_->size()),
      values_(rows_ * cols_, fill) {}

Panel::Panel(CalendarPtr calendar, UniversePtr universe, std::vector<double> values)
    : calendar_(std::move(calendar)),
      universe_(std::move(universe)),
      rows_(calendar_->size()),
      cols_(universe_->size()),
      values_(std::move(values)) {
    if (values_.size() != rows_ * cols_)
        throw DataError("panel values size does not match calendar x universe shape");
}

bool Panel::same_shape(const Panel& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           *calendar_ == *other.calendar_ && *universe_ == *other.universe_;
}

Panel Panel::head(std::size_t t) const {
    if (t == 0 || t > rows_) throw DataError("head: row count out of range");
    auto cal = std::make_shared<TradingCalendar>(
        std::vector<std::string>(calendar_->dates().begin(), calendar_->dates().begin() + t));
    std::vector<double> v(values_.begin(), values_.begin() + t * cols_);
    return Panel(cal, universe_, std::move(v));
}

bool Panel::all_finite_or_nan() const {
    for (double v : values_)
        if (std::isinf(v)) return false;
    return true;
}

} // namespace alphaforge
