#include "nsp/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsp/automata.hpp"
#include "nsp/complexity.hpp"
#include "nsp/dataset.hpp"
#include "nsp/harness.hpp"
#include "nsp/logicwidth.hpp"

namespace nsp {

namespace {

using Json = nlohmann::ordered_json;

// Thrown for argument problems found after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::unknown_kind:
    case ErrorCode::arity_mismatch:
    case ErrorCode::empty_range:
        return kExitBadArguments;
    case ErrorCode::unsatisfiable_config: return kExitUnsatisfiable;
    case ErrorCode::shape_mismatch: return kExitShapeMismatch;
    default: return kExitFailure;
    }
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end || text.empty())
        throw UsageError(std::string("invalid ") + what + " '" + text + "'");
    return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        T v{};
        const auto* end = item.data() + item.size();
        auto [p, ec] = std::from_chars(item.data(), end, v);
        if (item.empty() || ec != std::errc() || p != end)
            throw UsageError(std::string("invalid ") + what + " '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what);
    return out;
}

// Writes through `out` unless a path is given.
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    write(file);
    if (!file) throw Error(ErrorCode::invalid_argument, "write to '" + path + "' failed");
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NSP_SEED")) return parse_u64(env, "NSP_SEED");
    return 0;
}

// ---- generate ----

struct GenerateArgs {
    std::string task;
    std::string split = "train";
    std::optional<std::size_t> count;
    std::optional<std::string> seed;
    std::optional<std::size_t> n, l, s;
    std::optional<int> base;
    std::string out_path;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    GenerateRequest req;
    req.task = a.task;
    try {
        req.role = parse_split_role(a.split);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    req.count = a.count.value_or(req.role == SplitRole::validation ? kValidationSetSize : 32);
    req.seed = a.seed ? parse_u64(*a.seed, "seed") : default_seed();
    req.n = a.n;
    req.l = a.l;
    req.s = a.s;
    req.base = a.base;
    const auto ds = generate_dataset(req);
    emit(a.out_path, out, [&](std::ostream& o) { write_dataset(o, ds); });
    return kExitOk;
}

// ---- oracle ----

struct OracleArgs {
    std::string dataset;
    std::string out_path;
    std::optional<std::size_t> finite_reverse;
};

std::optional<TaskKind> oracle_kind(const Dataset& ds, const SequenceRule& rule) {
    if (const auto* e = find_digit_entry(ds.header.task)) return e->kind;
    switch (rule.kind) {
    case RuleKind::fixed_difference: return TaskKind::fixed_difference;
    case RuleKind::rounded_geometric: return TaskKind::geometric;
    case RuleKind::reverse_order: return TaskKind::reverse;
    case RuleKind::linear_recurrence:
        if (rule.coefficients == std::vector<std::int64_t>{1, 1}) return TaskKind::fibonacci;
        if (rule.coefficients == std::vector<std::int64_t>{2, -1}) return TaskKind::arithmetic;
        return std::nullopt;
    }
    return std::nullopt;
}

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
    const auto ds = read_dataset_file(a.dataset);
    if (ds.header.level == TaskLevel::number) {
        err << "oracle: no oracle for number-level task '" << ds.header.task
            << "'; its targets come from the generator\n";
        return kExitNoOracle;
    }
    PredictionFile preds;
    preds.dataset_ref = ds.header.task + "@" + dataset_fingerprint(ds);
    preds.mode = PredictionMode::tokens;

    const int base = ds.header.base;
    const std::size_t stream_tokens = ds.header.n.value_or(0) + ds.header.s.value_or(0);
    std::map<std::string, std::unique_ptr<Transducer>> machines;
    for (const auto& inst : ds.instances) {
        const auto kind = oracle_kind(ds, inst.rule);
        if (!kind) {
            err << "oracle: no oracle for rule of instance " << inst.id << "\n";
            return kExitNoOracle;
        }
        const std::string key = std::string(to_string(*kind)) + ":" + Json(inst.rule.coefficients).dump() + ":" +
                                std::to_string(inst.rule.difference);
        auto& machine = machines[key];
        if (!machine) {
            if (*kind == TaskKind::reverse && a.finite_reverse) {
                machine = build_bounded_reverse_fsm(base, *a.finite_reverse);
            } else {
                std::size_t registers = 0;
                if (*kind == TaskKind::fixed_difference)
                    registers = counter_registers_for(ds.header.split, inst.rule.difference, stream_tokens, base);
                try {
                    machine = build_oracle(*kind, inst.rule, base, registers);
                } catch (const Error& e) {
                    err << "oracle: " << e.what() << "\n";
                    return kExitNoOracle;
                }
            }
        }
        PredictionRecord rec;
        rec.id = inst.id;
        rec.tokens = run_transducer(*machine, inst.input);
        preds.records.push_back(std::move(rec));
    }
    emit(a.out_path, out, [&](std::ostream& o) { write_predictions(o, preds); });
    return kExitOk;
}

// ---- analyze ----

struct AnalyzeArgs {
    std::string coeffs;
    std::string bases = "2,3,4,5";
    std::size_t max_functions = 4;
    std::int64_t coeff_bound = 8;
    int width_base = 4;
    bool no_carry_in = false;
    int exact_inputs = 8;
    int max_inputs = 11;
    bool json = false;
    bool no_search = false;
    std::string export_table;
    std::string import_table;
};

int cmd_import_table(const AnalyzeArgs& a, std::ostream& out) {
    std::ifstream in(a.import_table);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + a.import_table + "'");
    const auto table = read_truth_table(in);
    const auto mode = table.input_bits() <= a.exact_inputs ? MinimizeMode::exact : MinimizeMode::heuristic;
    const auto cover = minimize_sop(table, mode);
    if (a.json) {
        Json j;
        j["inputs"] = table.input_bits();
        j["outputs"] = table.output_bits();
        j["term_count"] = cover.term_count;
        j["exact"] = cover.exact;
        Json terms = Json::array();
        for (const auto& c : cover.terms) terms.push_back(c.to_string(table.input_bits()));
        j["terms"] = terms;
        out << j.dump() << "\n";
    } else {
        out << "table: " << table.input_bits() << " inputs, " << table.output_bits() << " outputs\n";
        out << "cover: " << cover.term_count << " product terms (" << (cover.exact ? "exact" : "upper bound")
            << ")\n";
        for (const auto& c : cover.terms) out << "  " << c.to_string(table.input_bits()) << "\n";
    }
    return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    if (!a.import_table.empty()) return cmd_import_table(a, out);
    if (a.coeffs.empty()) throw UsageError("analyze needs --coeffs or --import-table");
    const auto coeffs = parse_list<std::int64_t>(a.coeffs, "coefficients");
    const auto bases = parse_list<int>(a.bases, "bases");
    const bool carry = !a.no_carry_in;

    if (!a.export_table.empty()) {
        const auto table = build_digit_op_table(coeffs, bases.front(), carry);
        emit(a.export_table, out, [&](std::ostream& o) { write_truth_table(o, table); });
    }

    struct Row {
        int base;
        std::optional<std::size_t> inputs;
        std::optional<std::size_t> count;
        bool exact = false;
        std::string note;
    };
    std::vector<Row> rows;
    std::vector<int> fit_bases;
    std::vector<std::size_t> fit_counts;
    for (int b : bases) {
        Row row{b, std::nullopt, std::nullopt, false, ""};
        try {
            const auto table = build_digit_op_table(coeffs, b, carry);
            row.inputs = static_cast<std::size_t>(table.input_bits());
            if (table.input_bits() > a.max_inputs) {
                row.note = "skipped: table wider than --max-inputs";
            } else {
                const auto mode =
                    table.input_bits() <= a.exact_inputs ? MinimizeMode::exact : MinimizeMode::heuristic;
                const auto cover = minimize_sop(table, mode);
                row.count = cover.term_count;
                row.exact = cover.exact;
                fit_bases.push_back(b);
                fit_counts.push_back(cover.term_count);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::budget_exceeded) throw;
            row.note = "skipped: over the input budget";
        }
        rows.push_back(row);
    }
    std::optional<double> slope;
    try {
        slope = log_log_slope(fit_bases, fit_counts);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_fit) throw;
    }
    bool increasing = fit_counts.size() >= 2;
    for (std::size_t i = 1; i < fit_counts.size(); ++i) increasing = increasing && fit_counts[i] > fit_counts[i - 1];

    std::optional<ComplexityResult> cx;
    std::string cx_note;
    if (!a.no_search) {
        ComplexityOptions opt;
        opt.coeff_bound = a.coeff_bound;
        opt.max_functions = a.max_functions;
        opt.width_base = a.width_base;
        try {
            cx = complexity_search(coeffs, opt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::no_plan_found) throw;
            cx_note = e.what();
        }
    }

    const std::string tag = asymptotic_tag(coeffs);
    if (a.json) {
        Json j;
        j["coeffs"] = coeffs;
        j["carry_in"] = carry;
        Json table = Json::array();
        for (const auto& r : rows) {
            Json e;
            e["base"] = r.base;
            e["inputs"] = r.inputs ? Json(*r.inputs) : Json(nullptr);
            e["count"] = r.count ? Json(*r.count) : Json(nullptr);
            e["exact"] = r.exact;
            if (!r.note.empty()) e["note"] = r.note;
            table.push_back(e);
        }
        j["widths"] = table;
        j["slope"] = slope ? Json(*slope) : Json(nullptr);
        j["strictly_increasing"] = increasing;
        j["asymptotic"] = tag;
        if (cx) {
            j["complexity"] = cx->complexity;
            j["difficulty"] = cx->difficulty;
            j["plan"] = cx->plan.to_string();
            j["member_widths"] = cx->plan.widths();
            j["chain_complexity"] = cx->chain_complexity ? Json(*cx->chain_complexity) : Json(nullptr);
            j["chain_difficulty"] = cx->chain_difficulty ? Json(*cx->chain_difficulty) : Json(nullptr);
        } else {
            j["complexity"] = nullptr;
            if (!cx_note.empty()) j["search_note"] = cx_note;
        }
        out << j.dump() << "\n";
        return kExitOk;
    }

    out << "coefficients: " << a.coeffs << (carry ? " (free carry-in)" : " (no carry-in)") << "\n";
    out << "base  inputs  width\n";
    for (const auto& r : rows) {
        out << std::setw(4) << r.base << "  " << std::setw(6) << (r.inputs ? std::to_string(*r.inputs) : "-") << "  ";
        if (r.count)
            out << *r.count << (r.exact ? "" : " (upper bound)");
        else
            out << r.note;
        out << "\n";
    }
    if (slope) out << "log-log slope: " << std::fixed << std::setprecision(3) << *slope << std::defaultfloat << "\n";
    out << "strictly increasing: " << (increasing ? "yes" : "no") << "\n";
    out << "asymptotic: " << tag << "\n";
    if (cx) {
        out << "complexity: " << cx->complexity << "\n";
        out << "difficulty: " << cx->difficulty << " (width base " << a.width_base << ")\n";
        out << "plan: " << cx->plan.to_string() << "\n";
        if (cx->chain_complexity)
            out << "chain complexity: " << *cx->chain_complexity << ", difficulty " << *cx->chain_difficulty << "\n";
    } else if (!cx_note.empty()) {
        out << "complexity: none (" << cx_note << ")\n";
    }
    return kExitOk;
}

// ---- evaluate ----

struct EvaluateArgs {
    std::string dataset;
    std::string predictions;
    bool breakdown = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    const auto ds = read_dataset_file(a.dataset);
    const auto preds = read_predictions_file(a.predictions);
    const std::string ref = ds.header.task + "@" + dataset_fingerprint(ds);
    if (preds.dataset_ref != ref)
        err << "evaluate: warning: predictions reference '" << preds.dataset_ref << "', dataset is '" << ref << "'\n";
    const auto report = evaluate(ds, preds);

    Json j;
    j["task"] = ds.header.task;
    j["level"] = std::string(to_string(report.level));
    j["total_predictions"] = report.total_predictions;
    j["wrong_predictions"] = report.wrong_predictions;
    j["error_rate"] = report.rate_fraction();
    j["error_rate_decimal"] = report.rate_decimal();
    std::size_t flagged = 0;
    Json flagged_ids = Json::array();
    for (std::size_t i = 0; i < report.instance_errors.size(); ++i) {
        if (report.instance_errors[i] > 0) {
            ++flagged;
            flagged_ids.push_back(i);
        }
    }
    j["instances"] = report.instance_errors.size();
    j["instances_with_errors"] = flagged;
    j["error_ids"] = flagged_ids;
    j["delimiter_violations"] = report.delimiter_violations;
    if (a.breakdown) {
        Json cells = Json::array();
        for (const auto& [key, v] : report.position_errors) cells.push_back(Json::array({key.first, key.second, v}));
        j["position_errors"] = cells;
    }
    out << j.dump() << "\n";
    out << "task " << ds.header.task << ": " << report.wrong_predictions << " wrong of " << report.total_predictions
        << " (error rate " << report.rate_fraction() << " = " << report.rate_decimal() << ")\n";
    out << "instances with errors: " << flagged << " of " << report.instance_errors.size() << "\n";
    if (!report.delimiter_violations.empty())
        out << "leading-delimiter violations (not scored): " << report.delimiter_violations.size() << "\n";
    if (a.breakdown) out << render_breakdown(report);
    return kExitOk;
}

// ---- splitcheck ----

struct SplitcheckArgs {
    std::vector<std::string> datasets;
    bool catalog = false;
    std::size_t count = 256;
    std::optional<std::string> seed;
};

std::size_t report_violations(const std::string& label, const std::vector<SplitViolation>& v, std::ostream& out) {
    out << label << ": " << v.size() << " violation" << (v.size() == 1 ? "" : "s") << "\n";
    const std::size_t shown = std::min<std::size_t>(v.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
        out << "  " << (v[i].id ? "id " + std::to_string(*v[i].id) : std::string("dataset")) << ": " << v[i].message
            << "\n";
    }
    if (v.size() > shown) out << "  ... " << v.size() - shown << " more\n";
    return v.size();
}

int cmd_splitcheck(const SplitcheckArgs& a, std::ostream& out) {
    if (a.datasets.empty() && !a.catalog) throw UsageError("splitcheck needs dataset paths or --catalog");
    std::size_t total = 0;
    for (const auto& path : a.datasets) {
        const auto ds = read_dataset_file(path);
        const auto [train, val] = declared_splits(ds.header.task);
        total += report_violations(path, check_split(ds, train, val), out);
    }
    if (a.catalog) {
        const std::uint64_t seed = a.seed ? parse_u64(*a.seed, "seed") : default_seed();
        struct Config {
            std::string task;
            std::optional<int> base;
        };
        std::vector<Config> configs;
        for (const auto& e : list_rule_catalog()) {
            configs.push_back({e.name, std::nullopt});
            for (int b : e.base_variants) configs.push_back({e.name, b});
        }
        for (const auto& e : list_digit_catalog()) configs.push_back({e.name, std::nullopt});
        for (const auto& c : configs) {
            for (auto role : {SplitRole::train, SplitRole::validation}) {
                GenerateRequest req;
                req.task = c.task;
                req.role = role;
                req.count = a.count;
                req.seed = seed;
                req.base = c.base;
                const auto ds = generate_dataset(req);
                const auto [train, val] = declared_splits(c.task);
                std::string label = c.task + (c.base ? " base " + std::to_string(*c.base) : "") + " " +
                                    std::string(to_string(role));
                total += report_violations(label, check_split(ds, train, val), out);
            }
        }
    }
    return total == 0 ? kExitOk : kExitSplitViolations;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Number sequence prediction tasks: generation, oracles, analysis and scoring", "nsp"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a JSON-lines dataset");
    g->add_option("--task", gen.task, "Catalog task name")->required();
    g->add_option("--split", gen.split, "train or val");
    g->add_option("--count", gen.count, "Instances (default 32 for train, 1024 for val)");
    g->add_option("--seed", gen.seed, "Master seed (default $NSP_SEED or 0)");
    g->add_option("--n", gen.n, "Input rows or leading tokens");
    g->add_option("--l", gen.l, "Digits per row (number-level)");
    g->add_option("--s", gen.s, "Target rows or scored tokens");
    g->add_option("--base", gen.base, "Digit base");
    g->add_option("--out", gen.out_path, "Output path (default stdout)");

    OracleArgs ora;
    auto* o = app.add_subcommand("oracle", "Run the reference transducer over a digit-level dataset");
    o->add_option("dataset", ora.dataset)->required();
    o->add_option("--out", ora.out_path, "Output path (default stdout)");
    o->add_option("--finite-reverse", ora.finite_reverse, "Use the finite reverse machine capped at this m");

    AnalyzeArgs ana;
    auto* an = app.add_subcommand("analyze", "Width growth and complexity of a linear digit operation");
    an->add_option("--coeffs", ana.coeffs, "Comma-separated coefficients, most recent term first");
    an->add_option("--bases", ana.bases, "Comma-separated bases for the width table");
    an->add_option("--max-functions", ana.max_functions, "Search depth");
    an->add_option("--coeff-bound", ana.coeff_bound, "Largest |p|, |q| in the operation catalog");
    an->add_option("--width-base", ana.width_base, "Base at which member widths are measured");
    an->add_flag("--no-carry-in", ana.no_carry_in, "Width table without the carry-in input");
    an->add_option("--exact-inputs", ana.exact_inputs, "Largest table minimized exactly");
    an->add_option("--max-inputs", ana.max_inputs, "Largest table minimized at all");
    an->add_flag("--no-search", ana.no_search, "Skip the complexity search");
    an->add_flag("--json", ana.json, "Emit JSON instead of text");
    an->add_option("--export-table", ana.export_table, "Write the truth table at the first base");
    an->add_option("--import-table", ana.import_table, "Minimize a truth table file instead");

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Score a prediction file against a dataset");
    e->add_option("dataset", ev.dataset)->required();
    e->add_option("predictions", ev.predictions)->required();
    e->add_flag("--breakdown", ev.breakdown, "Add the per-position error map");

    SplitcheckArgs sc;
    auto* s = app.add_subcommand("splitcheck", "Check initial terms against the declared split ranges");
    s->add_option("datasets", sc.datasets, "Dataset files");
    s->add_flag("--catalog", sc.catalog, "Generate and check every shipped configuration");
    s->add_option("--count", sc.count, "Instances per configuration with --catalog");
    s->add_option("--seed", sc.seed, "Master seed for --catalog");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& pe) {
        if (pe.get_exit_code() == 0) return app.exit(pe, out, err);
        err << "nsp: " << pe.what() << "\n";
        return kExitBadArguments;
    }

    try {
        if (g->parsed()) return cmd_generate(gen, out);
        if (o->parsed()) return cmd_oracle(ora, out, err);
        if (an->parsed()) return cmd_analyze(ana, out);
        if (e->parsed()) return cmd_evaluate(ev, out, err);
        if (s->parsed()) return cmd_splitcheck(sc, out);
    } catch (const UsageError& ue) {
        err << "nsp: " << ue.what() << "\n";
        return kExitBadArguments;
    } catch (const Error& ne) {
        err << "nsp: " << ne.what() << "\n";
        return exit_code_for(ne.code());
    } catch (const std::exception& ex) {
        err << "nsp: " << ex.what() << "\n";
        return kExitFailure;
    }
    return kExitBadArguments;
}

}  // namespace nsp
