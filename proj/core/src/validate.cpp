#include "alphaforge/validate.hpp"

#include <cctype>
#include <cmath>
#include <map>

namespace alphaforge {

namespace {

struct FnSpec {
    int arity_min;
    int arity_max;
    int window_arg;       // -1 if none
    int window_min;       // minimum window after flooring
    bool group_arg;       // second argument must be IndClass.<level>
};

const std::map<std::string, FnSpec>& function_table() {
    static const std::map<std::string, FnSpec> table = {
        {"abs", {1, 1, -1, 0, false}},
        {"log", {1, 1, -1, 0, false}},
        {"sign", {1, 1, -1, 0, false}},
        {"rank", {1, 1, -1, 0, false}},
        {"scale", {1, 2, -1, 0, false}},
        {"indneutralize", {2, 2, -1, 0, true}},
        {"signedpower", {2, 2, -1, 0, false}},
        {"delay", {2, 2, 1, 0, false}},
        {"delta", {2, 2, 1, 1, false}},
        {"correlation", {3, 3, 2, 2, false}},
        {"covariance", {3, 3, 2, 2, false}},
        {"decay_linear", {2, 2, 1, 1, false}},
        {"ts_min", {2, 2, 1, 1, false}},
        {"ts_max", {2, 2, 1, 1, false}},
        {"ts_argmax", {2, 2, 1, 1, false}},
        {"ts_argmin", {2, 2, 1, 1, false}},
        {"ts_rank", {2, 2, 1, 2, false}},
        {"sum", {2, 2, 1, 1, false}},
        {"product", {2, 2, 1, 1, false}},
        {"stddev", {2, 2, 1, 2, false}},
        // min/max resolve to ts_min/ts_max when the second argument is a
        // bare number literal, otherwise to the elementwise pair.
        {"min", {2, 2, -1, 0, false}},
        {"max", {2, 2, -1, 0, false}},
    };
    return table;
}

bool is_input_name(const std::string& name, int* adv_days) {
    if (name == "returns" || name == "open" || name == "close" || name == "high" ||
        name == "low" || name == "volume" || name == "vwap" || name == "cap")
        return true;
    if (name.size() > 3 && name.rfind("adv", 0) == 0) {
        int d = 0;
        for (std::size_t i = 3; i < name.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
            d = d * 10 + (name[i] - '0');
        }
        if (d < 1) return false;
        if (adv_days) *adv_days = d;
        return true;
    }
    return false;
}

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, {1, 1}); }

struct Collector {
    std::set<std::string> inputs;
    std::set<IndustryLevel> levels;
};

// Normalizes one node: floors windows, resolves min/max, enforces arity and
// argument-kind rules. `group_ok` marks positions where IndClass refs are legal.
ExprPtr normalize(const ExprPtr& node, Collector& collect, bool group_ok = false) {
    const Expr& e = *node;
    switch (e.kind) {
        case ExprKind::Number:
            return node;
        case ExprKind::Input: {
            if (!is_input_name(e.name, nullptr))
                fail("unknown identifier '" + e.name + "'");
            collect.inputs.insert(e.name);
            return node;
        }
        case ExprKind::Group: {
            if (!group_ok)
                fail("IndClass." + e.name + " is only valid as the second argument of "
                     "indneutralize");
            collect.levels.insert(*industry_level_from_string(e.name));
            return node;
        }
        case ExprKind::Unary:
            return Expr::make_negate(normalize(e.args[0], collect));
        case ExprKind::Binary:
            return Expr::make_binary(e.bin, normalize(e.args[0], collect),
                                     normalize(e.args[1], collect));
        case ExprKind::Ternary:
            return Expr::make_ternary(normalize(e.args[0], collect),
                                      normalize(e.args[1], collect),
                                      normalize(e.args[2], collect));
        case ExprKind::Call:
            break;
    }

    auto it = function_table().find(e.name);
    if (it == function_table().end()) fail("unknown function '" + e.name + "'");
    const FnSpec& spec = it->second;
    const int n = static_cast<int>(e.args.size());
    if (n < spec.arity_min || n > spec.arity_max)
        fail("function '" + e.name + "' expects " +
             (spec.arity_min == spec.arity_max
                  ? std::to_string(spec.arity_min)
                  : std::to_string(spec.arity_min) + ".." + std::to_string(spec.arity_max)) +
             " argument(s), got " + std::to_string(n));

    std::string name = e.name;
    int window_arg = spec.window_arg;
    int window_min = spec.window_min;

    if (name == "min" || name == "max") {
        if (e.args[1]->kind == ExprKind::Number) {
            name = (name == "min") ? "ts_min" : "ts_max"; // A.2 alias form
            window_arg = 1;
            window_min = 1;
        }
    }

    std::vector<ExprPtr> args;
    args.reserve(e.args.size());
    for (int i = 0; i < n; ++i) {
        if (i == window_arg) {
            const Expr& w = *e.args[i];
            if (w.kind != ExprKind::Number)
                fail("window argument of '" + name + "' must be a number literal");
            const int floored = static_cast<int>(std::floor(w.number));
            if (floored < window_min)
                fail("window " + std::to_string(floored) + " of '" + name +
                     "' is below the minimum " + std::to_string(window_min) +
                     " after flooring");
            args.push_back(Expr::make_number(static_cast<double>(floored)));
        } else if (spec.group_arg && i == 1) {
            if (e.args[i]->kind != ExprKind::Group)
                fail("second argument of indneutralize must be IndClass.<level>");
            args.push_back(normalize(e.args[i], collect, /*group_ok=*/true));
        } else {
            if (name == "scale" && i == 1) {
                const Expr& a = *e.args[i];
                if (a.kind != ExprKind::Number || !(a.number > 0))
                    fail("scale amount must be a positive number literal");
            }
            args.push_back(normalize(e.args[i], collect));
        }
    }
    return Expr::make_call(std::move(name), std::move(args));
}

int window_of(const Expr& call, int index) {
    return static_cast<int>(call.args[index]->number);
}

// Total history requirement in days; windows compose additively along nesting.
int lookback(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Number:
        case ExprKind::Group:
            return 1;
        case ExprKind::Input: {
            if (e.name == "returns") return 2; // derived from yesterday's close
            int adv_days = 0;
            if (is_input_name(e.name, &adv_days) && adv_days > 0) return adv_days;
            return 1;
        }
        case ExprKind::Unary:
            return lookback(*e.args[0]);
        case ExprKind::Binary:
        case ExprKind::Ternary: {
            int m = 1;
            for (const auto& a : e.args) m = std::max(m, lookback(*a));
            return m;
        }
        case ExprKind::Call:
            break;
    }
    const std::string& fn = e.name;
    if (fn == "delay" || fn == "delta") return lookback(*e.args[0]) + window_of(e, 1);
    if (fn == "correlation" || fn == "covariance")
        return std::max(lookback(*e.args[0]), lookback(*e.args[1])) + window_of(e, 2) - 1;
    if (fn == "ts_min" || fn == "ts_max" || fn == "ts_argmax" || fn == "ts_argmin" ||
        fn == "ts_rank" || fn == "sum" || fn == "product" || fn == "stddev" ||
        fn == "decay_linear")
        return lookback(*e.args[0]) + window_of(e, 1) - 1;
    // rank, scale, indneutralize, abs, log, sign, signedpower, min, max
    int m = 1;
    for (const auto& a : e.args)
        if (a->kind != ExprKind::Group) m = std::max(m, lookback(*a));
    return m;
}

} // namespace

bool is_known_function(const std::string& name) { return function_table().count(name) > 0; }

ValidatedExpr validate(const ExprPtr& expr) {
    Collector collect;
    ValidatedExpr out;
    out.expr = normalize(expr, collect);
    out.required_inputs = std::move(collect.inputs);
    out.required_industry_levels = std::move(collect.levels);
    out.max_lookback = lookback(*out.expr);
    return out;
}

} // namespace alphaforge
