#include "nsp/harness.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace nsp {

std::size_t argmax_decode(std::span<const double> probabilities) {
    if (probabilities.empty()) throw Error(ErrorCode::empty_vector, "argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < probabilities.size(); ++i)
        if (probabilities[i] > probabilities[best]) best = i;
    return best;
}

std::string EvalReport::rate_fraction() const {
    return std::to_string(rate_num) + "/" + std::to_string(rate_den);
}

std::string EvalReport::rate_decimal(int places) const {
    if (places < 0) throw Error(ErrorCode::invalid_argument, "negative decimal places");
    BigInt scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    // Round half up: floor((2 * num * scale + den) / (2 * den)).
    const BigInt scaled = (BigInt(rate_num) * scale * 2 + rate_den) / (BigInt(rate_den) * 2);
    const BigInt whole = scaled / scale;
    std::string frac = to_decimal(scaled % scale);
    if (places == 0) return to_decimal(whole);
    frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
    return to_decimal(whole) + "." + frac;
}

namespace {

PositionKey position_of(TaskLevel level, const ScoringCase& c, std::size_t k) {
    if (level == TaskLevel::number) return {k / c.cols, k % c.cols};
    return {0, k - c.leading};
}

void check_case(TaskLevel level, const ScoringCase& c, std::size_t index) {
    if (c.predicted.size() != c.target.size()) {
        throw Error(ErrorCode::shape_mismatch, "instance " + std::to_string(index) + ": expected " +
                                                   std::to_string(c.target.size()) + " values, got " +
                                                   std::to_string(c.predicted.size()));
    }
    if (level == TaskLevel::number) {
        if (c.cols == 0 || c.target.size() % c.cols != 0)
            throw Error(ErrorCode::shape_mismatch, "instance " + std::to_string(index) + ": not a grid of width " +
                                                       std::to_string(c.cols));
    } else if (c.leading > c.target.size()) {
        throw Error(ErrorCode::shape_mismatch, "instance " + std::to_string(index) + ": leading region too long");
    }
}

std::size_t first_scored(TaskLevel level, const ScoringCase& c) {
    return level == TaskLevel::number ? 0 : c.leading;
}

}  // namespace

EvalReport error_rate(std::span<const ScoringCase> cases, TaskLevel level, int delimiter) {
    EvalReport report;
    report.level = level;
    report.instance_errors.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        check_case(level, c, i);
        if (level == TaskLevel::digit && delimiter >= 0) {
            const bool ok = std::all_of(c.predicted.begin(), c.predicted.begin() + static_cast<std::ptrdiff_t>(c.leading),
                                        [&](int t) { return t == delimiter; });
            if (!ok) report.delimiter_violations.push_back(i);
        }
        std::uint64_t wrong = 0;
        for (std::size_t k = first_scored(level, c); k < c.target.size(); ++k) {
            const auto key = position_of(level, c, k);
            ++report.position_totals[key];
            if (c.predicted[k] != c.target[k]) {
                ++wrong;
                ++report.position_errors[key];
            }
            ++report.total_predictions;
        }
        report.wrong_predictions += wrong;
        report.instance_errors.push_back(wrong);
    }
    if (report.total_predictions > 0) {
        const auto g = std::gcd(report.wrong_predictions, report.total_predictions);
        report.rate_num = report.wrong_predictions / g;
        report.rate_den = report.total_predictions / g;
    }
    return report;
}

std::map<PositionKey, std::uint64_t> position_breakdown(std::span<const ScoringCase> cases, TaskLevel level) {
    return error_rate(cases, level).position_errors;
}

std::string render_breakdown(const EvalReport& report) {
    std::ostringstream out;
    if (report.position_totals.empty()) return "(nothing scored)\n";
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const auto& [key, _] : report.position_totals) {
        rows = std::max(rows, key.first + 1);
        cols = std::max(cols, key.second + 1);
    }
    auto count = [&](std::size_t r, std::size_t c) -> std::uint64_t {
        auto it = report.position_errors.find({r, c});
        return it == report.position_errors.end() ? 0 : it->second;
    };
    std::size_t cell = 1;
    for (const auto& [_, v] : report.position_errors) cell = std::max(cell, std::to_string(v).size());
    cell = std::max(cell, std::to_string(cols - 1).size());
    auto pad = [&](const std::string& s) { return std::string(cell - std::min(cell, s.size()), ' ') + s; };

    // Column 0 is the least significant digit (number-level) or the first
    // scored token (digit-level).
    out << (report.level == TaskLevel::number ? "row\\pos" : "offset ");
    for (std::size_t c = 0; c < cols; ++c) out << ' ' << pad(std::to_string(c));
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        std::string label = report.level == TaskLevel::number ? std::to_string(r) : "errors";
        out << label << std::string(7 - std::min<std::size_t>(7, label.size()), ' ');
        for (std::size_t c = 0; c < cols; ++c) {
            const auto v = count(r, c);
            out << ' ' << pad(v == 0 ? "." : std::to_string(v));
        }
        out << '\n';
    }
    return out.str();
}

std::vector<ScoringCase> align_predictions(const Dataset& dataset, const PredictionFile& predictions) {
    const auto& h = dataset.header;
    const std::size_t count = dataset.instances.size();
    std::vector<const PredictionRecord*> by_id(count, nullptr);
    std::vector<std::size_t> unknown;
    std::vector<std::size_t> duplicate;
    for (const auto& rec : predictions.records) {
        if (rec.id >= count) {
            unknown.push_back(rec.id);
        } else if (by_id[rec.id]) {
            duplicate.push_back(rec.id);
        } else {
            by_id[rec.id] = &rec;
        }
    }
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < count; ++i)
        if (!by_id[i]) missing.push_back(i);

    auto list = [](const std::vector<std::size_t>& ids) {
        std::string s;
        const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) s += (i ? "," : "") + std::to_string(ids[i]);
        if (ids.size() > shown) s += ",... (" + std::to_string(ids.size()) + " total)";
        return s;
    };
    std::string problems;
    if (!missing.empty()) problems += "missing ids: " + list(missing);
    if (!unknown.empty()) problems += std::string(problems.empty() ? "" : "; ") + "unknown ids: " + list(unknown);
    if (!duplicate.empty())
        problems += std::string(problems.empty() ? "" : "; ") + "duplicate ids: " + list(duplicate);
    if (!problems.empty()) throw Error(ErrorCode::shape_mismatch, problems);

    const int alphabet = h.level == TaskLevel::number ? h.base : alphabet_size(h.base);
    std::vector<ScoringCase> cases(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& inst = dataset.instances[i];
        const auto& rec = *by_id[i];
        auto& c = cases[i];
        c.target = inst.target;
        c.cols = h.level == TaskLevel::number ? h.l.value_or(0) : 0;
        c.leading = dataset.leading(i);
        if (predictions.mode == PredictionMode::tokens) {
            c.predicted = rec.tokens;
        } else {
            c.predicted.reserve(rec.probs.size());
            for (const auto& cell : rec.probs) {
                if (cell.size() != static_cast<std::size_t>(alphabet))
                    throw Error(ErrorCode::shape_mismatch, "id " + std::to_string(i) + ": probability vectors need " +
                                                               std::to_string(alphabet) + " channels");
                c.predicted.push_back(static_cast<int>(argmax_decode(cell)));
            }
        }
        if (c.predicted.size() != c.target.size())
            throw Error(ErrorCode::shape_mismatch, "id " + std::to_string(i) + ": expected " +
                                                       std::to_string(c.target.size()) + " values, got " +
                                                       std::to_string(c.predicted.size()));
    }
    return cases;
}

EvalReport evaluate(const Dataset& dataset, const PredictionFile& predictions) {
    const auto cases = align_predictions(dataset, predictions);
    const int delimiter = dataset.header.level == TaskLevel::digit ? delimiter_token(dataset.header.base) : -1;
    return error_rate(cases, dataset.header.level, delimiter);
}

namespace {

std::string range_text(const SplitSpec& s) {
    return "[" + std::to_string(s.lower) + ", " + std::to_string(s.upper) + ")";
}

}  // namespace

std::vector<SplitViolation> check_split(const Dataset& dataset, const SplitSpec& train, const SplitSpec& validation) {
    std::vector<SplitViolation> out;
    if (train.overlaps(validation)) {
        out.push_back({std::nullopt, "declared train " + range_text(train) + " and validation " +
                                         range_text(validation) + " overlap"});
    }
    const auto& h = dataset.header;
    const SplitSpec& declared = h.split.role == SplitRole::train ? train : validation;
    if (h.split.lower != declared.lower || h.split.upper != declared.upper) {
        out.push_back({std::nullopt, "header range " + range_text(h.split) + " differs from the declared " +
                                         std::string(to_string(h.split.role)) + " range " + range_text(declared)});
    }
    for (const auto& inst : dataset.instances) {
        if (inst.rule.kind == RuleKind::reverse_order) {
            if (!inst.m) throw Error(ErrorCode::missing_metadata, "instance " + std::to_string(inst.id) + " has no m");
            if (!declared.contains(Term(*inst.m)))
                out.push_back({inst.id, "m = " + std::to_string(*inst.m) + " outside " + range_text(declared)});
            continue;
        }
        if (inst.initial_terms.empty())
            throw Error(ErrorCode::missing_metadata, "instance " + std::to_string(inst.id) + " has no initial terms");
        for (std::size_t k = 0; k < inst.initial_terms.size(); ++k) {
            const auto& t = inst.initial_terms[k];
            if (!declared.contains(t)) {
                out.push_back({inst.id, "initial term " + std::to_string(k) + " = " + to_decimal(t) + " outside " +
                                            range_text(declared)});
            }
        }
    }
    return out;
}

std::pair<SplitSpec, SplitSpec> declared_splits(std::string_view task) {
    if (const auto* e = find_rule_entry(task)) return {e->train, e->validation};
    if (const auto* e = find_digit_entry(task)) return {e->train, e->validation};
    throw Error(ErrorCode::unknown_kind, "no task named '" + std::string(task) + "'");
}

}  // namespace nsp
