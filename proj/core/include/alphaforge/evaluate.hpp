#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alphaforge/corpus.hpp"
#include "alphaforge/market_data.hpp"
#include "alphaforge/validate.hpp"

namespace alphaforge {

struct EvalConfig {
    std::optional<IndustryLevel> industry_level_override;
    double variance_epsilon = 1e-12; // zero-variance threshold for correlation
};

struct EvalReport {
    Panel values;
    int warmup_rows = 0; // == max_lookback - 1
    double nan_fraction_after_warmup = 0.0;
};

/// Interprets a validated expression over market data: bottom-up tree walk
/// dispatching whole-panel kernels, with per-call common-subexpression
/// caching. Deterministic; no lookahead.
EvalReport evaluate(const ValidatedExpr& expr, const MarketData& market,
                    const EvalConfig& config = {});

struct CorpusEvalResult {
    std::map<int, EvalReport> reports;
    std::map<int, std::string> errors; // per-alpha failures, batch continues
};

/// Evaluates many alphas, fanning out across a bounded worker pool.
/// threads == 0 means ALPHAFORGE_THREADS env var, else hardware concurrency.
CorpusEvalResult evaluate_corpus(const std::vector<AlphaDef>& defs, const MarketData& market,
                                 const EvalConfig& config = {}, int threads = 0);

} // namespace alphaforge
