#include "nsp/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace nsp {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

std::int64_t term_to_int(const Term& t) {
    if (t > std::numeric_limits<std::int64_t>::max() || t < std::numeric_limits<std::int64_t>::min())
        throw Error(ErrorCode::overflow, "initial term " + to_decimal(t) + " exceeds 64 bits");
    return t.convert_to<std::int64_t>();
}

Json rule_to_json(const SequenceRule& rule) {
    Json j;
    j["kind"] = std::string(to_string(rule.kind));
    switch (rule.kind) {
    case RuleKind::linear_recurrence: j["coefficients"] = rule.coefficients; break;
    case RuleKind::fixed_difference: j["difference"] = rule.difference; break;
    case RuleKind::rounded_geometric:
        j["ratio_num"] = rule.ratio_num;
        j["ratio_den"] = rule.ratio_den;
        break;
    case RuleKind::reverse_order: break;
    }
    return j;
}

// Field access with parse errors that name the line.
template <typename T>
T field(const Json& j, const char* key, std::size_t line) {
    if (!j.is_object() || !j.contains(key)) parse_fail(line, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        parse_fail(line, std::string("bad value for '") + key + "'");
    }
}

std::vector<int> int_array(const Json& j, const char* key, std::size_t line) {
    if (!j.contains(key) || !j.at(key).is_array()) parse_fail(line, std::string("'") + key + "' is not an array");
    std::vector<int> out;
    out.reserve(j.at(key).size());
    for (const auto& v : j.at(key)) {
        if (!v.is_number_integer()) parse_fail(line, std::string("non-integer in '") + key + "'");
        out.push_back(v.get<int>());
    }
    return out;
}

std::optional<std::size_t> optional_size(const Json& j, const char* key, std::size_t line) {
    if (!j.contains(key)) parse_fail(line, std::string("missing field '") + key + "'");
    if (j.at(key).is_null()) return std::nullopt;
    return field<std::size_t>(j, key, line);
}

SequenceRule rule_from_json(const Json& j, std::size_t line) {
    if (!j.is_object()) parse_fail(line, "rule is not an object");
    const auto kind = field<std::string>(j, "kind", line);
    SequenceRule rule;
    if (kind == "linear_recurrence") {
        rule = SequenceRule::linear(field<std::vector<std::int64_t>>(j, "coefficients", line));
    } else if (kind == "fixed_difference") {
        rule = SequenceRule::fixed_difference(field<std::int64_t>(j, "difference", line));
    } else if (kind == "rounded_geometric") {
        rule = SequenceRule::rounded_geometric(field<std::uint64_t>(j, "ratio_num", line),
                                               field<std::uint64_t>(j, "ratio_den", line));
    } else if (kind == "reverse_order") {
        rule = SequenceRule::reverse();
    } else {
        parse_fail(line, "unknown rule kind '" + kind + "'");
    }
    try {
        validate(rule);
    } catch (const Error& e) {
        parse_fail(line, e.what());
    }
    return rule;
}

Json header_to_json(const DatasetHeader& h) {
    Json j;
    j["format_version"] = h.format_version;
    j["task"] = h.task;
    j["level"] = std::string(to_string(h.level));
    j["base"] = h.base;
    j["n"] = h.n ? Json(*h.n) : Json(nullptr);
    j["l"] = h.l ? Json(*h.l) : Json(nullptr);
    j["s"] = h.s ? Json(*h.s) : Json(nullptr);
    Json split;
    split["role"] = std::string(to_string(h.split.role));
    split["lower"] = h.split.lower;
    split["upper"] = h.split.upper;
    j["split"] = split;
    j["master_seed"] = h.master_seed;
    j["count"] = h.count;
    if (h.level == TaskLevel::digit) {
        Json layout;
        layout["name"] = std::string(kStreamLayout);
        layout["version"] = kStreamLayoutVersion;
        j["stream_layout"] = layout;
    }
    return j;
}

Json instance_to_json(const DatasetInstance& inst) {
    Json j;
    j["id"] = inst.id;
    Json init = Json::array();
    for (const auto& t : inst.initial_terms) init.push_back(term_to_int(t));
    j["initial_terms"] = init;
    j["rule"] = rule_to_json(inst.rule);
    if (inst.m) j["m"] = *inst.m;
    if (inst.mixture_choice) j["mixture_choice"] = *inst.mixture_choice;
    j["input"] = inst.input;
    j["target"] = inst.target;
    return j;
}

Json parse_line(const std::string& text, std::size_t line) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        parse_fail(line, std::string("invalid JSON: ") + e.what());
    }
}

TaskLevel parse_level(const std::string& text, std::size_t line) {
    if (text == "number") return TaskLevel::number;
    if (text == "digit") return TaskLevel::digit;
    parse_fail(line, "unknown level '" + text + "'");
}

DatasetHeader header_from_json(const Json& j) {
    DatasetHeader h;
    h.format_version = field<int>(j, "format_version", 1);
    if (h.format_version != kFormatVersion)
        parse_fail(1, "unsupported format_version " + std::to_string(h.format_version));
    h.task = field<std::string>(j, "task", 1);
    h.level = parse_level(field<std::string>(j, "level", 1), 1);
    h.base = field<int>(j, "base", 1);
    if (h.base < 2 || h.base > 36) parse_fail(1, "base must lie in [2, 36]");
    h.n = optional_size(j, "n", 1);
    h.l = optional_size(j, "l", 1);
    h.s = optional_size(j, "s", 1);
    if (!j.contains("split") || !j.at("split").is_object()) parse_fail(1, "missing split");
    const auto& split = j.at("split");
    try {
        h.split.role = parse_split_role(field<std::string>(split, "role", 1));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse_error) throw;
        parse_fail(1, e.what());
    }
    h.split.lower = field<std::int64_t>(split, "lower", 1);
    h.split.upper = field<std::int64_t>(split, "upper", 1);
    h.master_seed = field<std::uint64_t>(j, "master_seed", 1);
    h.count = field<std::size_t>(j, "count", 1);
    if (h.level == TaskLevel::number && (!h.n || !h.l || !h.s)) parse_fail(1, "number-level needs n, l, s");
    if (h.level == TaskLevel::digit) {
        if (h.l) parse_fail(1, "digit-level datasets have no l");
        if (!j.contains("stream_layout")) parse_fail(1, "missing stream_layout");
        const auto& layout = j.at("stream_layout");
        if (field<std::string>(layout, "name", 1) != kStreamLayout ||
            field<int>(layout, "version", 1) != kStreamLayoutVersion)
            parse_fail(1, "unsupported stream layout");
    }
    return h;
}

DatasetInstance instance_from_json(const Json& j, std::size_t line) {
    if (!j.is_object()) parse_fail(line, "instance is not an object");
    DatasetInstance inst;
    inst.id = field<std::size_t>(j, "id", line);
    if (!j.contains("initial_terms")) {
        throw Error(ErrorCode::missing_metadata,
                    "instance " + std::to_string(inst.id) + " has no initial_terms");
    }
    for (auto v : field<std::vector<std::int64_t>>(j, "initial_terms", line)) inst.initial_terms.emplace_back(v);
    if (!j.contains("rule")) parse_fail(line, "missing field 'rule'");
    inst.rule = rule_from_json(j.at("rule"), line);
    if (j.contains("m")) inst.m = field<std::size_t>(j, "m", line);
    if (j.contains("mixture_choice")) inst.mixture_choice = field<std::size_t>(j, "mixture_choice", line);
    inst.input = int_array(j, "input", line);
    inst.target = int_array(j, "target", line);
    return inst;
}

void check_shapes(const Dataset& ds) {
    const auto& h = ds.header;
    for (std::size_t i = 0; i < ds.instances.size(); ++i) {
        const auto& inst = ds.instances[i];
        const std::size_t line = i + 2;
        std::size_t in_len = 0;
        std::size_t out_len = 0;
        int alphabet = h.base;
        if (h.level == TaskLevel::number) {
            in_len = *h.n * *h.l;
            out_len = *h.s * *h.l;
        } else {
            alphabet = alphabet_size(h.base);
            if (inst.rule.kind == RuleKind::reverse_order) {
                if (!inst.m) throw Error(ErrorCode::missing_metadata, "reverse instance " + std::to_string(inst.id) + " has no m");
                in_len = out_len = 2 * *inst.m;
            } else {
                if (!h.n || !h.s) parse_fail(1, "digit-level numeric tasks need n and s");
                in_len = out_len = *h.n + *h.s;
            }
        }
        if (inst.input.size() != in_len || inst.target.size() != out_len)
            parse_fail(line, "input/target length disagrees with the header");
        for (const auto* cells : {&inst.input, &inst.target})
            for (int v : *cells)
                if (v < 0 || v >= alphabet) parse_fail(line, "cell value " + std::to_string(v) + " out of range");
    }
}

}  // namespace

std::string_view to_string(TaskLevel level) {
    return level == TaskLevel::number ? "number" : "digit";
}

std::size_t Dataset::leading(std::size_t i) const {
    if (header.level == TaskLevel::number) return 0;
    const auto& inst = instances.at(i);
    return inst.m ? *inst.m : header.n.value_or(0);
}

std::size_t Dataset::scored(std::size_t i) const {
    if (header.level == TaskLevel::number) return header.s.value_or(0) * header.l.value_or(0);
    const auto& inst = instances.at(i);
    return inst.m ? *inst.m : header.s.value_or(0);
}

Dataset generate_dataset(const GenerateRequest& req) {
    Dataset ds;
    auto& h = ds.header;
    h.task = req.task;
    h.master_seed = req.seed;
    h.count = req.count;
    ds.instances.reserve(req.count);

    if (const auto* entry = find_rule_entry(req.task)) {
        GridConfig config;
        config.b = req.base.value_or(entry->default_base);
        if (req.n) config.n = *req.n;
        if (req.l) config.l = *req.l;
        if (req.s) config.s = *req.s;
        for (const auto& rule : entry->rules) validate(config, rule.order());
        h.level = TaskLevel::number;
        h.base = config.b;
        h.n = config.n;
        h.l = config.l;
        h.s = config.s;
        h.split = entry->split(req.role);
        for (std::size_t i = 0; i < req.count; ++i) {
            auto g = make_number_grid_instance(*entry, config, h.split, {req.seed, i});
            DatasetInstance inst;
            inst.id = i;
            inst.initial_terms = std::move(g.initial_terms);
            inst.rule = g.rule;
            inst.mixture_choice = g.mixture_choice;
            inst.input = std::move(g.input.cells);
            inst.target = std::move(g.target.cells);
            ds.instances.push_back(std::move(inst));
        }
        return ds;
    }

    const auto* entry = find_digit_entry(req.task);
    if (!entry) throw Error(ErrorCode::unknown_kind, "no task named '" + req.task + "'");
    if (req.l) throw Error(ErrorCode::invalid_argument, "l applies to number-level tasks only");
    h.level = TaskLevel::digit;
    h.split = entry->split(req.role);
    StreamConfig config;
    config.b = req.base.value_or(10);
    h.base = config.b;
    if (entry->kind == TaskKind::reverse) {
        if (req.n || req.s) throw Error(ErrorCode::invalid_argument, "reverse takes its length from the split");
        validate(StreamConfig{1, 1, config.b});
        for (std::size_t i = 0; i < req.count; ++i) {
            auto d = make_reverse_instance(h.split, config.b, {req.seed, i});
            DatasetInstance inst;
            inst.id = i;
            inst.rule = d.rule;
            inst.m = d.n;
            inst.input = std::move(d.input);
            inst.target = std::move(d.target);
            ds.instances.push_back(std::move(inst));
        }
        return ds;
    }
    if (req.n) config.n = *req.n;
    if (req.s) config.s = *req.s;
    validate(config);
    h.n = config.n;
    h.s = config.s;
    for (std::size_t i = 0; i < req.count; ++i) {
        auto d = make_digit_instance(entry->kind, config, h.split, {req.seed, i});
        DatasetInstance inst;
        inst.id = i;
        inst.initial_terms = std::move(d.initial_terms);
        inst.rule = d.rule;
        inst.input = std::move(d.input);
        inst.target = std::move(d.target);
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    if (dataset.header.count != dataset.instances.size())
        throw Error(ErrorCode::invalid_argument, "header count differs from the instance count");
    out << header_to_json(dataset.header).dump() << '\n';
    for (const auto& inst : dataset.instances) out << instance_to_json(inst).dump() << '\n';
}

std::string dataset_to_string(const Dataset& dataset) {
    std::ostringstream out;
    write_dataset(out, dataset);
    return out.str();
}

Dataset read_dataset(std::istream& in) {
    Dataset ds;
    std::string text;
    std::size_t line = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') parse_fail(line, "CR line endings are not allowed");
        if (text.empty()) parse_fail(line, "empty line");
        const auto j = parse_line(text, line);
        if (!have_header) {
            ds.header = header_from_json(j);
            have_header = true;
            continue;
        }
        auto inst = instance_from_json(j, line);
        if (inst.id != ds.instances.size())
            parse_fail(line, "expected id " + std::to_string(ds.instances.size()) + ", got " + std::to_string(inst.id));
        ds.instances.push_back(std::move(inst));
    }
    if (!have_header) parse_fail(1, "missing header");
    if (ds.instances.size() != ds.header.count)
        parse_fail(line, "header declares " + std::to_string(ds.header.count) + " instances, found " +
                             std::to_string(ds.instances.size()));
    check_shapes(ds);
    return ds;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "'");
    return read_dataset(in);
}

std::string dataset_fingerprint(const Dataset& dataset) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dataset_to_string(dataset)) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

void write_predictions(std::ostream& out, const PredictionFile& file) {
    Json header;
    header["format_version"] = kFormatVersion;
    header["dataset_ref"] = file.dataset_ref;
    header["mode"] = file.mode == PredictionMode::tokens ? "tokens" : "probs";
    out << header.dump() << '\n';
    for (const auto& rec : file.records) {
        Json j;
        j["id"] = rec.id;
        if (file.mode == PredictionMode::tokens)
            j["values"] = rec.tokens;
        else
            j["values"] = rec.probs;
        out << j.dump() << '\n';
    }
}

PredictionFile read_predictions(std::istream& in) {
    PredictionFile file;
    std::string text;
    std::size_t line = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty()) parse_fail(line, "empty line");
        const auto j = parse_line(text, line);
        if (!have_header) {
            if (field<int>(j, "format_version", line) != kFormatVersion) parse_fail(line, "unsupported format_version");
            file.dataset_ref = field<std::string>(j, "dataset_ref", line);
            const auto mode = field<std::string>(j, "mode", line);
            if (mode == "tokens")
                file.mode = PredictionMode::tokens;
            else if (mode == "probs")
                file.mode = PredictionMode::probs;
            else
                parse_fail(line, "unknown mode '" + mode + "'");
            have_header = true;
            continue;
        }
        PredictionRecord rec;
        rec.id = field<std::size_t>(j, "id", line);
        if (file.mode == PredictionMode::tokens) {
            rec.tokens = int_array(j, "values", line);
        } else {
            if (!j.contains("values") || !j.at("values").is_array()) parse_fail(line, "'values' is not an array");
            for (const auto& cell : j.at("values")) {
                if (!cell.is_array()) parse_fail(line, "probs cells must be arrays");
                std::vector<double> probs;
                for (const auto& p : cell) {
                    if (!p.is_number()) parse_fail(line, "non-numeric probability");
                    probs.push_back(p.get<double>());
                }
                rec.probs.push_back(std::move(probs));
            }
        }
        file.records.push_back(std::move(rec));
    }
    if (!have_header) parse_fail(1, "missing header");
    return file;
}

PredictionFile read_predictions_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "'");
    return read_predictions(in);
}

}  // namespace nsp
