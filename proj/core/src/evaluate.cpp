#include "alphaforge/evaluate.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>
#include <unordered_map>

#include "alphaforge/kernels.hpp"

namespace alphaforge {

namespace {

const double kNaN = std::nan("");

double squash_inf(double v) { return std::isinf(v) ? kNaN : v; }

// A subtree evaluates to either a whole panel or a scalar constant.
struct Value {
    std::optional<Panel> panel;
    double scalar = 0.0;
    bool is_scalar() const { return !panel.has_value(); }
};

double fold_binary(BinOp op, double a, double b) {
    const bool nan_in = std::isnan(a) || std::isnan(b);
    switch (op) {
        case BinOp::Add: return squash_inf(a + b);
        case BinOp::Sub: return squash_inf(a - b);
        case BinOp::Mul: return squash_inf(a * b);
        case BinOp::Div: return b == 0.0 ? kNaN : squash_inf(a / b);
        case BinOp::Pow: return squash_inf(std::pow(a, b));
        case BinOp::Lt: return nan_in ? kNaN : (a < b ? 1.0 : 0.0);
        case BinOp::Gt: return nan_in ? kNaN : (a > b ? 1.0 : 0.0);
        case BinOp::Le: return nan_in ? kNaN : (a <= b ? 1.0 : 0.0);
        case BinOp::Ge: return nan_in ? kNaN : (a >= b ? 1.0 : 0.0);
        case BinOp::Eq: return nan_in ? kNaN : (a == b ? 1.0 : 0.0);
        case BinOp::Or:
            if ((!std::isnan(a) && a != 0.0) || (!std::isnan(b) && b != 0.0)) return 1.0;
            return nan_in ? kNaN : 0.0;
    }
    return kNaN;
}

ops::BinaryKind arith_kind(BinOp op) {
    switch (op) {
        case BinOp::Add: return ops::BinaryKind::Add;
        case BinOp::Sub: return ops::BinaryKind::Sub;
        case BinOp::Mul: return ops::BinaryKind::Mul;
        case BinOp::Div: return ops::BinaryKind::Div;
        default: return ops::BinaryKind::Pow;
    }
}

ops::CompareKind compare_kind(BinOp op) {
    switch (op) {
        case BinOp::Lt: return ops::CompareKind::Lt;
        case BinOp::Gt: return ops::CompareKind::Gt;
        case BinOp::Le: return ops::CompareKind::Le;
        case BinOp::Ge: return ops::CompareKind::Ge;
        default: return ops::CompareKind::Eq;
    }
}

class Interpreter {
public:
    Interpreter(const MarketData& market, const EvalConfig& config)
        : market_(market), config_(config) {}

    Value eval(const Expr& e) {
        const std::string key = pretty_print(e);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        Value v = eval_uncached(e);
        cache_.emplace(key, v);
        return v;
    }

    Panel to_panel(const Value& v) const {
        if (!v.is_scalar()) return *v.panel;
        return Panel(market_.calendar, market_.universe, squash_inf(v.scalar));
    }

private:
    Value eval_uncached(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Number:
                return Value{std::nullopt, e.number};
            case ExprKind::Input:
                return Value{resolve_input(e.name), 0.0};
            case ExprKind::Group:
                throw EvalError("IndClass reference outside indneutralize");
            case ExprKind::Unary: {
                Value c = eval(*e.args[0]);
                if (c.is_scalar()) return Value{std::nullopt, -c.scalar};
                return Value{ops::elementwise_unary(ops::UnaryKind::Negate, *c.panel), 0.0};
            }
            case ExprKind::Binary:
                return eval_binary(e);
            case ExprKind::Ternary: {
                Panel cond = to_panel(eval(*e.args[0]));
                Panel a = to_panel(eval(*e.args[1]));
                Panel b = to_panel(eval(*e.args[2]));
                return Value{ops::ternary_select(cond, a, b), 0.0};
            }
            case ExprKind::Call:
                return eval_call(e);
        }
        throw EvalError("unreachable expression kind");
    }

    Value eval_binary(const Expr& e) {
        Value lhs = eval(*e.args[0]);
        Value rhs = eval(*e.args[1]);
        if (lhs.is_scalar() && rhs.is_scalar())
            return Value{std::nullopt, fold_binary(e.bin, lhs.scalar, rhs.scalar)};

        switch (e.bin) {
            case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
            case BinOp::Div: case BinOp::Pow: {
                const auto kind = arith_kind(e.bin);
                if (lhs.is_scalar())
                    return Value{ops::elementwise_binary(kind, lhs.scalar, *rhs.panel), 0.0};
                if (rhs.is_scalar())
                    return Value{ops::elementwise_binary(kind, *lhs.panel, rhs.scalar), 0.0};
                return Value{ops::elementwise_binary(kind, *lhs.panel, *rhs.panel), 0.0};
            }
            case BinOp::Lt: case BinOp::Gt: case BinOp::Le:
            case BinOp::Ge: case BinOp::Eq: {
                const auto kind = compare_kind(e.bin);
                if (lhs.is_scalar())
                    return Value{ops::compare(kind, lhs.scalar, *rhs.panel), 0.0};
                if (rhs.is_scalar())
                    return Value{ops::compare(kind, *lhs.panel, rhs.scalar), 0.0};
                return Value{ops::compare(kind, *lhs.panel, *rhs.panel), 0.0};
            }
            case BinOp::Or:
                return Value{ops::logical_or(to_panel(lhs), to_panel(rhs)), 0.0};
        }
        throw EvalError("unreachable binary operator");
    }

    Value eval_call(const Expr& e) {
        const std::string& fn = e.name;
        auto arg_panel = [&](int i) { return to_panel(eval(*e.args[i])); };
        auto window = [&](int i) { return static_cast<int>(e.args[i]->number); };

        if (fn == "abs") return Value{ops::elementwise_unary(ops::UnaryKind::Abs, arg_panel(0)), 0.0};
        if (fn == "log") return Value{ops::elementwise_unary(ops::UnaryKind::Log, arg_panel(0)), 0.0};
        if (fn == "sign") return Value{ops::elementwise_unary(ops::UnaryKind::Sign, arg_panel(0)), 0.0};
        if (fn == "rank") return Value{ops::cs_rank(arg_panel(0)), 0.0};
        if (fn == "scale") {
            const double a = e.args.size() > 1 ? e.args[1]->number : 1.0;
            return Value{ops::cs_scale(arg_panel(0), a), 0.0};
        }
        if (fn == "indneutralize") {
            IndustryLevel level = *industry_level_from_string(e.args[1]->name);
            if (config_.industry_level_override) level = *config_.industry_level_override;
            if (!market_.industry.has_level(level))
                throw EvalError(std::string("industry level '") + to_string(level) +
                                "' required by indneutralize is not available");
            const ops::GroupVector gv =
                ops::make_group_vector(market_.industry, level, *market_.universe);
            return Value{ops::cs_indneutralize(arg_panel(0), gv), 0.0};
        }
        if (fn == "signedpower") {
            Value a = eval(*e.args[1]);
            if (a.is_scalar()) return Value{ops::signedpower(arg_panel(0), a.scalar), 0.0};
            return Value{ops::signedpower(arg_panel(0), *a.panel), 0.0};
        }
        if (fn == "delay") return Value{ops::ts_delay(arg_panel(0), window(1)), 0.0};
        if (fn == "delta") return Value{ops::ts_delta(arg_panel(0), window(1)), 0.0};
        if (fn == "correlation")
            return Value{ops::ts_correlation(arg_panel(0), arg_panel(1), window(2),
                                             config_.variance_epsilon), 0.0};
        if (fn == "covariance")
            return Value{ops::ts_covariance(arg_panel(0), arg_panel(1), window(2)), 0.0};
        if (fn == "decay_linear") return Value{ops::decay_linear(arg_panel(0), window(1)), 0.0};
        if (fn == "ts_min") return Value{ops::ts_min(arg_panel(0), window(1)), 0.0};
        if (fn == "ts_max") return Value{ops::ts_max(arg_panel(0), window(1)), 0.0};
        if (fn == "ts_argmax") return Value{ops::ts_argmax(arg_panel(0), window(1)), 0.0};
        if (fn == "ts_argmin") return Value{ops::ts_argmin(arg_panel(0), window(1)), 0.0};
        if (fn == "ts_rank") return Value{ops::ts_rank(arg_panel(0), window(1)), 0.0};
        if (fn == "sum") return Value{ops::ts_sum(arg_panel(0), window(1)), 0.0};
        if (fn == "product") return Value{ops::ts_product(arg_panel(0), window(1)), 0.0};
        if (fn == "stddev") return Value{ops::ts_stddev(arg_panel(0), window(1)), 0.0};
        if (fn == "min")
            return Value{ops::elementwise_binary(ops::BinaryKind::Min, arg_panel(0), arg_panel(1)), 0.0};
        if (fn == "max")
            return Value{ops::elementwise_binary(ops::BinaryKind::Max, arg_panel(0), arg_panel(1)), 0.0};
        throw EvalError("unknown function '" + fn + "'");
    }

    Panel resolve_input(const std::string& name) {
        if (name == "open") return market_.open;
        if (name == "high") return market_.high;
        if (name == "low") return market_.low;
        if (name == "close") return market_.close;
        if (name == "volume") return market_.volume;
        if (name == "vwap") return market_.vwap;
        if (name == "returns") return market_.returns;
        if (name == "cap") {
            if (!market_.has_cap) throw EvalError("required input 'cap' is not available");
            return market_.cap;
        }
        if (name.rfind("adv", 0) == 0) {
            const int d = std::atoi(name.c_str() + 3);
            return derive_adv(market_, d);
        }
        throw EvalError("required input '" + name + "' is not available");
    }

    const MarketData& market_;
    const EvalConfig& config_;
    std::unordered_map<std::string, Value> cache_;
};

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("ALPHAFORGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

} // namespace

EvalReport evaluate(const ValidatedExpr& expr, const MarketData& market,
                    const EvalConfig& config) {
    for (IndustryLevel level : expr.required_industry_levels) {
        const IndustryLevel effective =
            config.industry_level_override ? *config.industry_level_override : level;
        if (!market.industry.has_level(effective))
            throw EvalError(std::string("required industry level '") + to_string(effective) +
                            "' is not available");
    }
    if (expr.required_inputs.count("cap") && !market.has_cap)
        throw EvalError("required input 'cap' is not available");
    const std::size_t T = market.calendar->size();
    if (T < static_cast<std::size_t>(expr.max_lookback))
        throw EvalError("insufficient history: expression requires " +
                        std::to_string(expr.max_lookback) + " days, market provides " +
                        std::to_string(T));

    Interpreter interp(market, config);
    Panel values = interp.to_panel(interp.eval(*expr.expr));

    EvalReport report{std::move(values), expr.max_lookback - 1, 0.0};
    std::size_t nan_count = 0, total = 0;
    for (std::size_t t = static_cast<std::size_t>(report.warmup_rows); t < T; ++t) {
        for (std::size_t i = 0; i < report.values.cols(); ++i) {
            ++total;
            if (std::isnan(report.values.at(t, i))) ++nan_count;
        }
    }
    report.nan_fraction_after_warmup =
        total == 0 ? 0.0 : static_cast<double>(nan_count) / static_cast<double>(total);
    return report;
}

CorpusEvalResult evaluate_corpus(const std::vector<AlphaDef>& defs, const MarketData& market,
                                 const EvalConfig& config, int threads) {
    const int n_threads =
        std::min<int>(resolve_threads(threads), std::max<int>(1, static_cast<int>(defs.size())));

    std::vector<std::optional<EvalReport>> reports(defs.size());
    std::vector<std::optional<std::string>> errors(defs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= defs.size()) return;
            try {
                ValidatedExpr v = validate(parse(defs[k].source));
                reports[k] = evaluate(v, market, config);
            } catch (const std::exception& ex) {
                errors[k] = ex.what();
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    CorpusEvalResult out;
    for (std::size_t k = 0; k < defs.size(); ++k) {
        if (reports[k]) out.reports.emplace(defs[k].id, std::move(*reports[k]));
        if (errors[k]) out.errors.emplace(defs[k].id, std::move(*errors[k]));
    }
    return out;
}

} // namespace alphaforge
