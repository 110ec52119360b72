#pragma once

#include <string>
#include <vector>

#include "alphaforge/market_data.hpp"
#include "alphaforge/panel.hpp"

namespace alphaforge::ops {

// Panel kernels with exact NaN, warmup and tie semantics. Every output cell
// that would be +-inf is coerced to NaN. Time-series kernels use the
// full-window rule: any NaN among the window values makes the output NaN,
// and the first d-1 rows are warmup NaN.

enum class UnaryKind { Abs, Log, Sign, Negate };
enum class BinaryKind { Add, Sub, Mul, Div, Pow, Min, Max };
enum class CompareKind { Lt, Gt, Le, Ge, Eq };

Panel elementwise_unary(UnaryKind kind, const Panel& x);

Panel elementwise_binary(BinaryKind kind, const Panel& x, const Panel& y);
Panel elementwise_binary(BinaryKind kind, const Panel& x, double y);
Panel elementwise_binary(BinaryKind kind, double x, const Panel& y);

/// 1.0 / 0.0 / NaN so comparison results compose with arithmetic.
Panel compare(CompareKind kind, const Panel& x, const Panel& y);
Panel compare(CompareKind kind, const Panel& x, double y);
Panel compare(CompareKind kind, double x, const Panel& y);

/// Nonzero is true. 1||NaN = 1 but 0||NaN = NaN.
Panel logical_or(const Panel& x, const Panel& y);

/// Per cell: cond != 0 -> a, cond == 0 -> b, cond NaN -> NaN.
Panel ternary_select(const Panel& cond, const Panel& a, const Panel& b);

/// Cross-sectional rank over non-NaN cells, average ties, mapped to [0,1]
/// via (r-1)/(n-1); a single valid cell ranks 0.5.
Panel cs_rank(const Panel& x);

/// Per date: x * a / sum(|x|); rows with zero absolute sum become zeros.
Panel cs_scale(const Panel& x, double a = 1.0);

/// Per-date column -> group index (constant across dates).
struct GroupVector {
    std::vector<int> group; // one entry per universe column
    int num_groups = 0;
};

GroupVector make_group_vector(const IndustryMap& industry, IndustryLevel level,
                              const Universe& universe);

/// Demeans within each group per date over non-NaN cells.
Panel cs_indneutralize(const Panel& x, const GroupVector& groups);

Panel ts_delay(const Panel& x, int d);
Panel ts_delta(const Panel& x, int d);

/// Pearson correlation over the trailing d-day window; NaN if either window
/// variance < var_epsilon; clamped to [-1, 1].
Panel ts_correlation(const Panel& x, const Panel& y, int d, double var_epsilon = 1e-12);

/// Sample covariance (d-1 denominator) over the trailing d-day window.
Panel ts_covariance(const Panel& x, const Panel& y, int d);

Panel ts_sum(const Panel& x, int d);
Panel ts_product(const Panel& x, int d);
Panel ts_stddev(const Panel& x, int d); // sample, d >= 2
Panel ts_min(const Panel& x, int d);
Panel ts_max(const Panel& x, int d);

/// Days since the window extremum: 0 = today, d-1 = oldest; ties resolve to
/// the most recent occurrence.
Panel ts_argmax(const Panel& x, int d);
Panel ts_argmin(const Panel& x, int d);

/// Rank of today's value within its trailing d-day window, average ties,
/// mapped to [0,1] via (r-1)/(d-1).
Panel ts_rank(const Panel& x, int d);

/// Weighted trailing mean with weights d, d-1, ..., 1 (today heaviest),
/// rescaled to sum to 1.
Panel decay_linear(const Panel& x, int d);

/// sign(x) * |x|^a per cell.
Panel signedpower(const Panel& x, const Panel& a);
Panel signedpower(const Panel& x, double a);

} // namespace alphaforge::ops
