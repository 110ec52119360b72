#include "alphaforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace alphaforge::ops {

namespace {

const double kNaN = std::nan("");

double squash_inf(double v) { return std::isinf(v) ? kNaN : v; }

void require_same_shape(const Panel& x, const Panel& y) {
    if (!x.same_shape(y)) throw DataError("panel shape mismatch");
}

Panel broadcast(double v, const Panel& like) {
    return Panel(like.calendar(), like.universe(), squash_inf(v));
}

double apply_unary(UnaryKind kind, double v) {
    switch (kind) {
        case UnaryKind::Abs: return std::abs(v);
        case UnaryKind::Log: return v > 0 ? std::log(v) : kNaN;
        case UnaryKind::Sign: return std::isnan(v) ? kNaN : (v > 0) - (v < 0);
        case UnaryKind::Negate: return -v;
    }
    return kNaN;
}

double apply_binary(BinaryKind kind, double a, double b) {
    switch (kind) {
        case BinaryKind::Add: return a + b;
        case BinaryKind::Sub: return a - b;
        case BinaryKind::Mul: return a * b;
        case BinaryKind::Div: return b == 0.0 ? kNaN : a / b;
        case BinaryKind::Pow: return std::pow(a, b);
        case BinaryKind::Min: return std::isnan(a) || std::isnan(b) ? kNaN : std::min(a, b);
        case BinaryKind::Max: return std::isnan(a) || std::isnan(b) ? kNaN : std::max(a, b);
    }
    return kNaN;
}

double apply_compare(CompareKind kind, double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return kNaN;
    switch (kind) {
        case CompareKind::Lt: return a < b ? 1.0 : 0.0;
        case CompareKind::Gt: return a > b ? 1.0 : 0.0;
        case CompareKind::Le: return a <= b ? 1.0 : 0.0;
        case CompareKind::Ge: return a >= b ? 1.0 : 0.0;
        case CompareKind::Eq: return a == b ? 1.0 : 0.0;
    }
    return kNaN;
}

} // namespace

Panel elementwise_unary(UnaryKind kind, const Panel& x) {
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, squash_inf(apply_unary(kind, x.at(t, i))));
    return out;
}

Panel elementwise_binary(BinaryKind kind, const Panel& x, const Panel& y) {
    require_same_shape(x, y);
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, squash_inf(apply_binary(kind, x.at(t, i), y.at(t, i))));
    return out;
}

Panel elementwise_binary(BinaryKind kind, const Panel& x, double y) {
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, squash_inf(apply_binary(kind, x.at(t, i), y)));
    return out;
}

Panel elementwise_binary(BinaryKind kind, double x, const Panel& y) {
    Panel out(y.calendar(), y.universe());
    for (std::size_t t = 0; t < y.rows(); ++t)
        for (std::size_t i = 0; i < y.cols(); ++i)
            out.set(t, i, squash_inf(apply_binary(kind, x, y.at(t, i))));
    return out;
}

Panel compare(CompareKind kind, const Panel& x, const Panel& y) {
    require_same_shape(x, y);
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, apply_compare(kind, x.at(t, i), y.at(t, i)));
    return out;
}

Panel compare(CompareKind kind, const Panel& x, double y) {
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, apply_compare(kind, x.at(t, i), y));
    return out;
}

Panel compare(CompareKind kind, double x, const Panel& y) {
    Panel out(y.calendar(), y.universe());
    for (std::size_t t = 0; t < y.rows(); ++t)
        for (std::size_t i = 0; i < y.cols(); ++i)
            out.set(t, i, apply_compare(kind, x, y.at(t, i)));
    return out;
}

Panel logical_or(const Panel& x, const Panel& y) {
    require_same_shape(x, y);
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t) {
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double a = x.at(t, i), b = y.at(t, i);
            double r;
            if ((!std::isnan(a) && a != 0.0) || (!std::isnan(b) && b != 0.0))
                r = 1.0; // truth dominates an unknown operand
            else if (std::isnan(a) || std::isnan(b))
                r = kNaN;
            else
                r = 0.0;
            out.set(t, i, r);
        }
    }
    return out;
}

Panel ternary_select(const Panel& cond, const Panel& a, const Panel& b) {
    require_same_shape(cond, a);
    require_same_shape(cond, b);
    Panel out(cond.calendar(), cond.universe());
    for (std::size_t t = 0; t < cond.rows(); ++t) {
        for (std::size_t i = 0; i < cond.cols(); ++i) {
            const double c = cond.at(t, i);
            out.set(t, i, std::isnan(c) ? kNaN : (c != 0.0 ? a.at(t, i) : b.at(t, i)));
        }
    }
    return out;
}

Panel cs_rank(const Panel& x) {
    Panel out(x.calendar(), x.universe());
    const std::size_t N = x.cols();
    std::vector<std::size_t> order;
    order.reserve(N);
    for (std::size_t t = 0; t < x.rows(); ++t) {
        order.clear();
        for (std::size_t i = 0; i < N; ++i)
            if (!std::isnan(x.at(t, i))) order.push_back(i);
        const std::size_t n = order.size();
        if (n == 0) continue;
        if (n == 1) {
            out.set(t, order[0], 0.5);
            continue;
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return x.at(t, a) < x.at(t, b); });
        std::size_t k = 0;
        while (k < n) {
            std::size_t j = k;
            while (j + 1 < n && x.at(t, order[j + 1]) == x.at(t, order[k])) ++j;
            const double avg_rank = (static_cast<double>(k) + static_cast<double>(j)) / 2.0 + 1.0;
            const double value = (avg_rank - 1.0) / static_cast<double>(n - 1);
            for (std::size_t m = k; m <= j; ++m) out.set(t, order[m], value);
            k = j + 1;
        }
    }
    return out;
}

Panel cs_scale(const Panel& x, double a) {
    if (!(a > 0)) throw DataError("scale amount must be positive");
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t) {
        double abs_sum = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double v = x.at(t, i);
            if (!std::isnan(v)) {
                abs_sum += std::abs(v);
                any = true;
            }
        }
        if (!any) continue;
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double v = x.at(t, i);
            if (std::isnan(v)) continue;
            out.set(t, i, abs_sum == 0.0 ? 0.0 : squash_inf(v * a / abs_sum));
        }
    }
    return out;
}

GroupVector make_group_vector(const IndustryMap& industry, IndustryLevel level,
                              const Universe& universe) {
    const std::vector<std::string>& ids = industry.level(level);
    if (ids.size() != universe.size())
        throw DataError("industry level does not cover the universe");
    GroupVector gv;
    gv.group.resize(ids.size());
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto [it, inserted] = index.try_emplace(ids[i], gv.num_groups);
        if (inserted) ++gv.num_groups;
        gv.group[i] = it->second;
    }
    return gv;
}

Panel cs_indneutralize(const Panel& x, const GroupVector& groups) {
    if (groups.group.size() != x.cols())
        throw DataError("group vector does not cover the universe");
    Panel out(x.calendar(), x.universe());
    std::vector<double> sum(groups.num_groups);
    std::vector<int> count(groups.num_groups);
    for (std::size_t t = 0; t < x.rows(); ++t) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double v = x.at(t, i);
            if (std::isnan(v)) continue;
            sum[groups.group[i]] += v;
            ++count[groups.group[i]];
        }
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double v = x.at(t, i);
            if (std::isnan(v)) continue;
            const int g = groups.group[i];
            out.set(t, i, squash_inf(v - sum[g] / count[g]));
        }
    }
    return out;
}

Panel ts_delay(const Panel& x, int d) {
    if (d < 0) throw DataError("delay requires d >= 0");
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = static_cast<std::size_t>(d); t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i) out.set(t, i, x.at(t - d, i));
    return out;
}

Panel ts_delta(const Panel& x, int d) {
    if (d < 1) throw DataError("delta requires d >= 1");
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = static_cast<std::size_t>(d); t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, squash_inf(x.at(t, i) - x.at(t - d, i)));
    return out;
}

namespace {

// Shared trailing-window driver: fn(begin pointer step pattern) per cell.
template <typename F>
Panel rolling(const Panel& x, int d, F&& fn) {
    Panel out(x.calendar(), x.universe());
    if (static_cast<std::size_t>(d) > x.rows()) return out;
    for (std::size_t i = 0; i < x.cols(); ++i) {
        for (std::size_t t = static_cast<std::size_t>(d) - 1; t < x.rows(); ++t) {
            bool valid = true;
            for (int k = 0; k < d; ++k) {
                if (std::isnan(x.at(t - k, i))) {
                    valid = false;
                    break;
                }
            }
            if (valid) out.set(t, i, squash_inf(fn(x, t, i)));
        }
    }
    return out;
}

} // namespace

Panel ts_correlation(const Panel& x, const Panel& y, int d, double var_epsilon) {
    require_same_shape(x, y);
    if (d < 2) throw DataError("correlation requires d >= 2");
    Panel out(x.calendar(), x.universe());
    for (std::size_t i = 0; i < x.cols(); ++i) {
        for (std::size_t t = static_cast<std::size_t>(d) - 1; t < x.rows(); ++t) {
            bool valid = true;
            double sx = 0, sy = 0;
            for (int k = 0; k < d; ++k) {
                const double a = x.at(t - k, i), b = y.at(t - k, i);
                if (std::isnan(a) || std::isnan(b)) {
                    valid = false;
                    break;
                }
                sx += a;
                sy += b;
            }
            if (!valid) continue;
            const double mx = sx / d, my = sy / d;
            double sxx = 0, syy = 0, sxy = 0;
            for (int k = 0; k < d; ++k) {
                const double a = x.at(t - k, i) - mx, b = y.at(t - k, i) - my;
                sxx += a * a;
                syy += b * b;
                sxy += a * b;
            }
            const double vx = sxx / (d - 1), vy = syy / (d - 1);
            if (vx < var_epsilon || vy < var_epsilon) continue; // stays NaN
            double r = sxy / std::sqrt(sxx * syy);
            r = std::clamp(r, -1.0, 1.0);
            out.set(t, i, squash_inf(r));
        }
    }
    return out;
}

Panel ts_covariance(const Panel& x, const Panel& y, int d) {
    require_same_shape(x, y);
    if (d < 2) throw DataError("covariance requires d >= 2");
    Panel out(x.calendar(), x.universe());
    for (std::size_t i = 0; i < x.cols(); ++i) {
        for (std::size_t t = static_cast<std::size_t>(d) - 1; t < x.rows(); ++t) {
            bool valid = true;
            double sx = 0, sy = 0;
            for (int k = 0; k < d; ++k) {
                const double a = x.at(t - k, i), b = y.at(t - k, i);
                if (std::isnan(a) || std::isnan(b)) {
                    valid = false;
                    break;
                }
                sx += a;
                sy += b;
            }
            if (!valid) continue;
            const double mx = sx / d, my = sy / d;
            double sxy = 0;
            for (int k = 0; k < d; ++k)
                sxy += (x.at(t - k, i) - mx) * (y.at(t - k, i) - my);
            out.set(t, i, squash_inf(sxy / (d - 1)));
        }
    }
    return out;
}

Panel ts_sum(const Panel& x, int d) {
    if (d < 1) throw DataError("sum requires d >= 1");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        double s = 0;
        for (int k = 0; k < d; ++k) s += p.at(t - k, i);
        return s;
    });
}

Panel ts_product(const Panel& x, int d) {
    if (d < 1) throw DataError("product requires d >= 1");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        double s = 1;
        for (int k = 0; k < d; ++k) s *= p.at(t - k, i);
        return s;
    });
}

Panel ts_stddev(const Panel& x, int d) {
    if (d < 2) throw DataError("stddev requires d >= 2");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        double s = 0;
        for (int k = 0; k < d; ++k) s += p.at(t - k, i);
        const double m = s / d;
        double ss = 0;
        for (int k = 0; k < d; ++k) {
            const double c = p.at(t - k, i) - m;
            ss += c * c;
        }
        return std::sqrt(ss / (d - 1));
    });
}

Panel ts_min(const Panel& x, int d) {
    if (d < 1) throw DataError("ts_min requires d >= 1");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        double m = p.at(t, i);
        for (int k = 1; k < d; ++k) m = std::min(m, p.at(t - k, i));
        return m;
    });
}

Panel ts_max(const Panel& x, int d) {
    if (d < 1) throw DataError("ts_max requires d >= 1");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        double m = p.at(t, i);
        for (int k = 1; k < d; ++k) m = std::max(m, p.at(t - k, i));
        return m;
    });
}

Panel ts_argmax(const Panel& x, int d) {
    if (d < 1) throw DataError("ts_argmax requires d >= 1");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        int best = 0; // 0 = today; strict > keeps the most recent tie
        for (int k = 1; k < d; ++k)
            if (p.at(t - k, i) > p.at(t - best, i)) best = k;
        return static_cast<double>(best);
    });
}

Panel ts_argmin(const Panel& x, int d) {
    if (d < 1) throw DataError("ts_argmin requires d >= 1");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        int best = 0;
        for (int k = 1; k < d; ++k)
            if (p.at(t - k, i) < p.at(t - best, i)) best = k;
        return static_cast<double>(best);
    });
}

Panel ts_rank(const Panel& x, int d) {
    if (d < 2) throw DataError("ts_rank requires d >= 2");
    return rolling(x, d, [d](const Panel& p, std::size_t t, std::size_t i) {
        const double today = p.at(t, i);
        int less = 0, equal = 0;
        for (int k = 0; k < d; ++k) {
            const double v = p.at(t - k, i);
            if (v < today) ++less;
            else if (v == today) ++equal;
        }
        const double avg_rank = less + (equal + 1.0) / 2.0;
        return (avg_rank - 1.0) / (d - 1);
    });
}

Panel decay_linear(const Panel& x, int d) {
    if (d < 1) throw DataError("decay_linear requires d >= 1");
    const double denom = d * (d + 1) / 2.0;
    return rolling(x, d, [d, denom](const Panel& p, std::size_t t, std::size_t i) {
        double s = 0;
        for (int k = 0; k < d; ++k) s += (d - k) * p.at(t - k, i);
        return s / denom;
    });
}

namespace {

double signed_power(double x, double a) {
    if (std::isnan(x) || std::isnan(a)) return kNaN;
    const double sign = (x > 0) - (x < 0);
    return squash_inf(sign * std::pow(std::abs(x), a));
}

} // namespace

Panel signedpower(const Panel& x, const Panel& a) {
    require_same_shape(x, a);
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, signed_power(x.at(t, i), a.at(t, i)));
    return out;
}

Panel signedpower(const Panel& x, double a) {
    Panel out(x.calendar(), x.universe());
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t i = 0; i < x.cols(); ++i)
            out.set(t, i, signed_power(x.at(t, i), a));
    return out;
}

} // namespace alphaforge::ops
