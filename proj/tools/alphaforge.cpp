// alphaforge command-line tool: validate alpha expression files, evaluate
// alphas over market data, simulate dollar-neutral books, and emit the
// statistics / correlation / regression report bundle.

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alphaforge/analytics.hpp"
#include "alphaforge/backtest.hpp"
#include "alphaforge/corpus.hpp"
#include "alphaforge/evaluate.hpp"

namespace fs = std::filesystem;
using namespace alphaforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file '" + path.string() + "'");
    out << text;
}

int cmd_validate(const std::string& path) {
    std::vector<std::pair<int, std::string>> entries;
    try {
        entries = parse_alpha_file(read_file(path));
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    if (entries.empty()) {
        std::cerr << "no expressions found in '" << path << "'\n";
        return kExitValidation;
    }
    bool all_ok = true;
    for (const auto& [id, source] : entries) {
        try {
            ValidatedExpr v = validate(parse(source));
            std::cout << "Alpha#" << id << ": OK (lookback " << v.max_lookback << " days)\n";
        } catch (const ParseError& e) {
            all_ok = false;
            std::cout << "Alpha#" << id << ": " << e.what() << "\n";
        }
    }
    return all_ok ? kExitOk : kExitValidation;
}

struct SyntheticSpec {
    std::uint64_t seed = 0;
    int days = 0;
    int assets = 0;
    int groups = 4;
};

SyntheticSpec parse_synthetic_spec(const std::string& text) {
    SyntheticSpec spec;
    bool have_seed = false, have_days = false, have_assets = false;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw DataError("synthetic spec item '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        const long long value = std::stoll(item.substr(eq + 1));
        if (key == "seed") { spec.seed = static_cast<std::uint64_t>(value); have_seed = true; }
        else if (key == "days") { spec.days = static_cast<int>(value); have_days = true; }
        else if (key == "assets") { spec.assets = static_cast<int>(value); have_assets = true; }
        else if (key == "groups") { spec.groups = static_cast<int>(value); }
        else throw DataError("unknown synthetic spec key '" + key + "'");
    }
    if (!have_seed || !have_days || !have_assets)
        throw DataError("synthetic spec needs seed=, days= and assets=");
    if (spec.days < 2 || spec.assets < 2 || spec.groups < 1)
        throw DataError("synthetic spec values out of range");
    return spec;
}

bool is_integer_list(const std::string& s) {
    bool any = false;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) { any = true; continue; }
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
        return false;
    }
    return any;
}

std::vector<AlphaDef> select_alphas(const std::string& selector) {
    if (selector == "all") return load_corpus();
    if (is_integer_list(selector)) {
        std::map<int, const AlphaDef*> by_id;
        for (const AlphaDef& d : load_corpus()) by_id[d.id] = &d;
        std::vector<AlphaDef> out;
        std::istringstream in(selector);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item.empty()) continue;
            const int id = std::stoi(item);
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw DataError("alpha id " + std::to_string(id) + " is not in 1..101");
            out.push_back(*it->second);
        }
        if (out.empty()) throw DataError("empty alpha selection");
        return out;
    }
    // Otherwise treat the selector as an external alpha source file.
    std::vector<AlphaDef> out;
    for (const auto& [id, source] : parse_alpha_file(read_file(selector))) {
        AlphaDef def;
        def.id = id;
        def.source = source;
        out.push_back(std::move(def));
    }
    if (out.empty()) throw DataError("no expressions found in '" + selector + "'");
    return out;
}

std::string values_to_csv(const Panel& p) {
    std::ostringstream out;
    out << "date";
    for (const std::string& a : p.universe()->assets()) out << ',' << a;
    out << '\n';
    char buf[64];
    for (std::size_t t = 0; t < p.rows(); ++t) {
        out << (*p.calendar())[t];
        for (std::size_t i = 0; i < p.cols(); ++i) {
            const double v = p.at(t, i);
            if (std::isnan(v)) { out << ",nan"; continue; }
            std::snprintf(buf, sizeof(buf), ",%.10g", v);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

void append_regression(std::ostringstream& report, const std::string& title,
                       const std::function<RegressionResult()>& fn) {
    try {
        report << format_regression(title, fn()) << "\n";
    } catch (const DataError& e) {
        report << title << "\n  skipped: " << e.what() << "\n\n";
    }
}

int cmd_run(const std::string& data_path, const std::string& synthetic, const std::string& alphas,
            double book, const std::string& out_dir, bool emit_values) {
    MarketData market = [&] {
        if (!synthetic.empty()) {
            const SyntheticSpec spec = parse_synthetic_spec(synthetic);
            return generate_synthetic(spec.seed, spec.days, spec.assets, spec.groups);
        }
        return load_market_csv(data_path);
    }();
    market.check_invariants();

    const std::vector<AlphaDef> defs = select_alphas(alphas);

    const CorpusEvalResult eval = evaluate_corpus(defs, market);
    for (const auto& [id, msg] : eval.errors)
        std::cerr << "Alpha#" << id << ": " << msg << "\n";
    if (eval.reports.empty()) {
        std::cerr << "error: no alpha evaluated successfully\n";
        return kExitValidation;
    }

    std::map<int, int> delay_class;
    for (const AlphaDef& d : defs) delay_class[d.id] = d.delay_class;

    const fs::path out(out_dir);
    fs::create_directories(out);

    std::map<int, AlphaStats> stats;
    std::map<int, std::vector<double>> book_returns;
    for (const auto& [id, report] : eval.reports) {
        try {
            const WeightMatrix w = alpha_to_weights(report.values);
            const SimResult sim = simulate(w, market, delay_class[id], book);
            AlphaStats s = compute_stats(sim);
            s.delay_class = delay_class[id];
            stats.emplace(id, s);
            std::vector<double> r(sim.daily_pnl.size());
            for (std::size_t t = 0; t < r.size(); ++t) r[t] = sim.daily_pnl[t] / book;
            book_returns.emplace(id, std::move(r));
        } catch (const DataError& e) {
            // Keep a row (all-NaN stats) so the CSV covers every evaluated
            // alpha; degenerate books (e.g. constant values) land here.
            std::cerr << "Alpha#" << id << ": " << e.what() << "\n";
            AlphaStats s;
            s.sharpe = s.turnover = s.holding_period = s.cents_per_share = s.daily_vol =
                s.ann_return = std::nan("");
            s.delay_class = delay_class[id];
            stats.emplace(id, s);
        }
        if (emit_values) {
            fs::create_directories(out / "values");
            write_file(out / "values" / ("alpha_" + std::to_string(id) + ".csv"),
                       values_to_csv(eval.reports.at(id).values));
        }
    }
    if (stats.empty()) {
        std::cerr << "error: no alpha produced simulation statistics\n";
        return kExitData;
    }

    write_file(out / "stats.csv", stats_to_csv(stats));

    std::ostringstream report;
    report << "alphaforge run report\n";
    report << "alphas evaluated: " << stats.size() << " of " << defs.size() << "\n";
    report << "book size: " << book << "\n\n";

    std::vector<AlphaStats> stat_rows;
    std::vector<double> s_v, t_v, ht_v, c_v, sig_v, ret_v;
    for (const auto& [id, s] : stats) {
        stat_rows.push_back(s);
        s_v.push_back(s.sharpe);
        t_v.push_back(s.turnover);
        ht_v.push_back(s.holding_period);
        c_v.push_back(s.cents_per_share);
        sig_v.push_back(1e3 * s.daily_vol);
        ret_v.push_back(100.0 * s.ann_return);
    }

    std::vector<std::pair<std::string, QuantileSummary>> summary = {
        {"S", summarize_quantiles(s_v)},
        {"T", summarize_quantiles(t_v)},
        {"1/T", summarize_quantiles(ht_v)},
        {"C", summarize_quantiles(c_v)},
        {"1e3*sigma", summarize_quantiles(sig_v)},
        {"100%*ann.return", summarize_quantiles(ret_v)},
    };

    bool have_corr = false;
    AlphaCorrMatrix corr;
    if (stats.size() >= 2) {
        try {
            corr = alpha_corr_matrix(book_returns);
            have_corr = true;
        } catch (const DataError& e) {
            std::cerr << "correlation matrix skipped: " << e.what() << "\n";
        }
    }
    if (have_corr) {
        write_file(out / "correlation.csv", corr_to_csv(corr));
        std::vector<double> psi_pairs;
        for (std::size_t i = 1; i < corr.ids.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) psi_pairs.push_back(100.0 * corr.psi[i][j]);
        if (!psi_pairs.empty())
            summary.emplace_back("100%*Psi_ij", summarize_quantiles(psi_pairs));
    }

    report << "Summary of per-alpha statistics\n" << format_summary_table(summary) << "\n";

    append_regression(report, "Regression: ln(R) over ln(sigma)",
                      [&] { return regress_return_vol(stat_rows, false); });
    append_regression(report, "Regression: ln(R) over ln(sigma) and ln(T)",
                      [&] { return regress_return_vol(stat_rows, true); });
    if (have_corr) {
        std::vector<double> turnover;
        for (int id : corr.ids) turnover.push_back(stats.at(id).turnover);
        append_regression(report, "Regression: Psi_a over y_a and z_a",
                          [&] { return regress_corr_on_turnover(corr, turnover); });
    }
    append_regression(report, "Regression: ln(sigma) over ln(T)",
                      [&] { return regress_vol_on_turnover(stat_rows); });

    report << reference_tables_text();
    write_file(out / "report.txt", report.str());

    std::cout << "wrote " << (out / "stats.csv").string();
    if (have_corr) std::cout << ", " << (out / "correlation.csv").string();
    std::cout << ", " << (out / "report.txt").string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"alphaforge: formulaic alpha evaluation and backtesting"};
    app.require_subcommand(1);

    std::string validate_path;
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check an alpha expression file");
    validate_cmd->add_option("file", validate_path, "alpha source file")->required();

    std::string data_path, synthetic, alphas = "all", out_dir = "out";
    double book = 2e7;
    bool emit_values = false;
    CLI::App* run_cmd = app.add_subcommand("run", "Evaluate, simulate and report");
    auto* data_opt = run_cmd->add_option("--data", data_path, "market data CSV");
    auto* synth_opt = run_cmd->add_option("--synthetic", synthetic,
                                          "seed=S,days=D,assets=N[,groups=G]");
    data_opt->excludes(synth_opt);
    synth_opt->excludes(data_opt);
    run_cmd->add_option("--alphas", alphas, "all | id list | alpha file");
    run_cmd->add_option("--book", book, "book size in dollars");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_flag("--emit-values", emit_values, "write per-alpha value panels");

    std::string corpus_out;
    CLI::App* corpus_cmd = app.add_subcommand("corpus", "Export the embedded alpha corpus");
    corpus_cmd->add_option("--out", corpus_out, "write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) return cmd_validate(validate_path);
        if (corpus_cmd->parsed()) {
            if (corpus_out.empty()) std::cout << corpus_source_text();
            else write_file(corpus_out, corpus_source_text());
            return kExitOk;
        }
        if (run_cmd->parsed()) {
            if (data_path.empty() && synthetic.empty()) {
                std::cerr << "error: run needs exactly one of --data or --synthetic\n";
                return kExitValidation;
            }
            return cmd_run(data_path, synthetic, alphas, book, out_dir, emit_values);
        }
    } catch (const ParseError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
