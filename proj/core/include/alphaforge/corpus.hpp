#pragma once

#include <set>
#include <string>
#include <vector>

#include "alphaforge/market_data.hpp"

namespace alphaforge {

/// One vetted corpus entry. `source` parses and validates as shipped; any
/// deviation from commonly printed copies (parenthesis repairs only) is
/// described in `notes`.
struct AlphaDef {
    int id = 0;
    std::string source;
    int delay_class = 1; // 0 only for ids 42, 48, 53, 54
    std::set<std::string> required_inputs;
    std::set<IndustryLevel> required_industry_levels;
    std::string notes;
};

/// The 101 embedded alphas, ids 1..101 in order. Parsed and validated once;
/// subsequent calls return the cached vector.
const std::vector<AlphaDef>& load_corpus();

struct DependencyRow {
    int id;
    std::set<std::string> inputs;
    std::set<IndustryLevel> industry_levels;
    int max_lookback;
};

std::vector<DependencyRow> corpus_dependency_report();

/// Raw corpus in the alpha source-file format ("Alpha#<id>: <expr>" lines,
/// '#' comments) for export to external tooling.
const std::string& corpus_source_text();

/// Parses alpha source-file text into (id, expression) entries. Entries
/// without an "Alpha#<id>:" prefix get sequential ids starting at 1.
std::vector<std::pair<int, std::string>> parse_alpha_file(const std::string& text);

} // namespace alphaforge
