#include "alphaforge/corpus.hpp"

#include <cctype>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "alphaforge/errors.hpp"
#include "alphaforge/validate.hpp"

namespace alphaforge::detail {
const char* embedded_corpus_text();
}

namespace alphaforge {

namespace {

// Expressions whose commonly printed form has unbalanced parentheses. The
// shipped source carries the minimal balancing repair; only parenthesization
// differs, never identifiers or numbers.
const std::map<int, std::string>& repair_notes() {
    static const std::map<int, std::string> notes = {
        {5, "removed one spurious trailing ')'"},
        {21, "removed one spurious '(' before the final ternary branch"},
        {24, "added one missing '(' at the start of the condition"},
        {31, "rebalanced '(' inside the decay_linear argument"},
        {34, "added one missing trailing ')'"},
        {48, "rebalanced ')' so sum((delta(close,1)/delay(close,1))^2,250) closes"},
        {56, "removed one spurious trailing ')'"},
        {60, "rebalanced ')' between the scale(rank(...)) terms"},
        {62, "rebalanced ')' around the comparison of summed ranks"},
        {64, "rebalanced ')' inside the first correlation argument"},
        {66, "rebalanced ')' inside the decay_linear argument"},
        {74, "rebalanced ')' around the correlation arguments"},
        {77, "moved the decay_linear window inside its call parentheses"},
        {92, "moved the decay_linear window inside its call parentheses"},
        {100, "rebalanced ')' in the indneutralize(rank(...)) term"},
    };
    return notes;
}

bool is_delay_zero(int id) { return id == 42 || id == 48 || id == 53 || id == 54; }

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<AlphaDef> build_corpus() {
    std::vector<AlphaDef> defs;
    for (const auto& [id, source] : parse_alpha_file(corpus_source_text())) {
        AlphaDef def;
        def.id = id;
        def.source = source;
        def.delay_class = is_delay_zero(id) ? 0 : 1;
        if (auto it = repair_notes().find(id); it != repair_notes().end()) def.notes = it->second;

        ValidatedExpr v = validate(parse(source));
        def.required_inputs = std::move(v.required_inputs);
        def.required_industry_levels = std::move(v.required_industry_levels);
        defs.push_back(std::move(def));
    }
    if (defs.size() != 101)
        throw std::logic_error("embedded corpus has " + std::to_string(defs.size()) +
                               " entries, expected 101");
    return defs;
}

} // namespace

std::vector<std::pair<int, std::string>> parse_alpha_file(const std::string& text) {
    std::vector<std::pair<int, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int next_id = 1;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        int id = next_id;
        std::string expr = t;
        if (t.rfind("Alpha#", 0) == 0) {
            const std::size_t colon = t.find(':');
            if (colon == std::string::npos)
                throw ParseError("alpha line is missing ':' after the id", {1, 1});
            id = std::atoi(t.c_str() + 6);
            if (id < 1) throw ParseError("invalid alpha id in '" + t.substr(0, colon) + "'", {1, 1});
            expr = trim(t.substr(colon + 1));
        }
        if (expr.empty()) throw ParseError("alpha entry has an empty expression", {1, 1});
        out.emplace_back(id, expr);
        next_id = id + 1;
    }
    return out;
}

const std::string& corpus_source_text() {
    static const std::string text = detail::embedded_corpus_text();
    return text;
}

const std::vector<AlphaDef>& load_corpus() {
    static const std::vector<AlphaDef> corpus = build_corpus();
    return corpus;
}

std::vector<DependencyRow> corpus_dependency_report() {
    std::vector<DependencyRow> rows;
    for (const AlphaDef& def : load_corpus()) {
        ValidatedExpr v = validate(parse(def.source));
        rows.push_back({def.id, v.required_inputs, v.required_industry_levels, v.max_lookback});
    }
    return rows;
}

} // namespace alphaforge
