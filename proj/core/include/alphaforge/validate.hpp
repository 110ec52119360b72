#pragma once

#include <set>
#include <string>

#include "alphaforge/expr.hpp"
#include "alphaforge/market_data.hpp"

namespace alphaforge {

/// A checked, normalized expression ready for evaluation.
///  - arities match the built-in function table
///  - non-integer window literals are floored; windows must be >= 1 after
///    flooring (delay allows 0)
///  - 2-argument min/max with a bare number literal second argument is
///    rewritten to ts_min/ts_max; otherwise it becomes elementwise min/max
///  - max_lookback is the total history requirement in days (windows compose
///    additively along nesting; input derivation counts, e.g. returns needs
///    2 days, adv{d} needs d)
struct ValidatedExpr {
    ExprPtr expr;
    std::set<std::string> required_inputs;
    std::set<IndustryLevel> required_industry_levels;
    int max_lookback = 1;
};

ValidatedExpr validate(const ExprPtr& expr);

/// True if name is a built-in function of the expression language.
bool is_known_function(const std::string& name);

} // namespace alphaforge
