#include "nsp/logicwidth.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace nsp {

TruthTable::TruthTable(int input_bits, int output_bits)
    : input_bits_(input_bits), output_bits_(output_bits) {
    if (input_bits < 0 || input_bits > kHeuristicInputBudget)
        throw Error(ErrorCode::budget_exceeded, std::to_string(input_bits) + " input bits");
    if (output_bits < 1 || output_bits > kMaxOutputs)
        throw Error(ErrorCode::invalid_argument, "output count must lie in [1, 32]");
    on_.assign(std::size_t{1} << input_bits, 0);
    dc_.assign(std::size_t{1} << input_bits, 0);
}

std::uint32_t TruthTable::output_mask() const {
    return output_bits_ == 32 ? 0xFFFFFFFFu : ((1u << output_bits_) - 1);
}

void TruthTable::set_row(std::size_t row, std::uint32_t on, std::uint32_t dc) {
    const std::uint32_t mask = output_mask();
    dc_[row] = dc & mask;
    on_[row] = on & mask & ~dc_[row];
}

int bits_for(int values) {
    int bits = 0;
    while ((1 << bits) < values) ++bits;
    return bits;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

TruthTable build_digit_op_table(const std::vector<std::int64_t>& coeffs, int base, bool include_carry_in) {
    if (coeffs.empty()) throw Error(ErrorCode::invalid_argument, "no coefficients");
    if (base < 2) throw Error(ErrorCode::invalid_argument, "base must be >= 2");

    std::int64_t lin_min = 0, lin_max = 0;
    for (auto c : coeffs) {
        lin_min += std::min<std::int64_t>(0, c) * (base - 1);
        lin_max += std::max<std::int64_t>(0, c) * (base - 1);
    }
    std::int64_t cmin = floor_div(lin_min, base), cmax = floor_div(lin_max, base);
    if (include_carry_in) {
        // Smallest carry interval closed under one more digit position.
        cmin = std::min<std::int64_t>(cmin, 0);
        cmax = std::max<std::int64_t>(cmax, 0);
        for (;;) {
            const auto lo = std::min(cmin, floor_div(lin_min + cmin, base));
            const auto hi = std::max(cmax, floor_div(lin_max + cmax, base));
            if (lo == cmin && hi == cmax) break;
            cmin = lo;
            cmax = hi;
        }
    }

    DigitEncoding enc;
    enc.base = base;
    enc.arity = static_cast<int>(coeffs.size());
    enc.bits_per_digit = bits_for(base);
    enc.carry_in = include_carry_in;
    enc.carry_out_min = static_cast<int>(cmin);
    enc.carry_out_max = static_cast<int>(cmax);
    enc.carry_out_bits = bits_for(static_cast<int>(cmax - cmin + 1));
    if (include_carry_in) {
        enc.carry_in_min = enc.carry_out_min;
        enc.carry_in_max = enc.carry_out_max;
        enc.carry_in_bits = enc.carry_out_bits;
    }
    const int input_bits = enc.arity * enc.bits_per_digit + enc.carry_in_bits;
    const int output_bits = enc.bits_per_digit + enc.carry_out_bits;
    if (input_bits > kExactInputBudget)
        throw Error(ErrorCode::budget_exceeded, std::to_string(input_bits) + " input bits exceed " +
                                                    std::to_string(kExactInputBudget));

    TruthTable table(input_bits, output_bits);
    const std::uint32_t digit_mask = (1u << enc.bits_per_digit) - 1;
    const std::uint32_t carry_mask = (1u << enc.carry_in_bits) - 1;
    for (std::uint32_t row = 0; row < table.row_count(); ++row) {
        std::int64_t sum = 0;
        bool valid = true;
        for (int i = 0; i < enc.arity; ++i) {
            const auto d = (row >> (i * enc.bits_per_digit)) & digit_mask;
            if (d >= static_cast<std::uint32_t>(base)) valid = false;
            sum += coeffs[i] * static_cast<std::int64_t>(d);
        }
        if (include_carry_in) {
            const auto code = (row >> (enc.arity * enc.bits_per_digit)) & carry_mask;
            if (code > static_cast<std::uint32_t>(cmax - cmin)) valid = false;
            sum += static_cast<std::int64_t>(code) + cmin;
        }
        if (!valid) {
            table.set_dont_care(row);
            continue;
        }
        const auto carry = floor_div(sum, base);
        const auto digit = sum - carry * base;
        const auto out = static_cast<std::uint32_t>(digit) |
                         (static_cast<std::uint32_t>(carry - cmin) << enc.bits_per_digit);
        table.set_row(row, out, 0);
    }
    table.set_encoding(enc);
    return table;
}

int Cube::literal_count() const { return std::popcount(care); }

std::string Cube::to_string(int input_bits) const {
    std::string s;
    for (int i = 0; i < input_bits; ++i) {
        const std::uint32_t bit = 1u << i;
        s += (care & bit) ? ((value & bit) ? '1' : '0') : '-';
    }
    return s;
}

std::uint32_t SopCover::evaluate(std::uint32_t input) const {
    std::uint32_t out = 0;
    for (std::size_t o = 0; o < per_output.size(); ++o) {
        for (auto idx : per_output[o]) {
            if (terms[idx].contains(input)) {
                out |= 1u << o;
                break;
            }
        }
    }
    return out;
}

bool cover_matches(const SopCover& cover, const TruthTable& table) {
    if (cover.per_output.size() != static_cast<std::size_t>(table.output_bits())) return false;
    for (std::uint32_t row = 0; row < table.row_count(); ++row) {
        const std::uint32_t care = table.output_mask() & ~table.dc(row);
        if ((cover.evaluate(row) & care) != table.on(row)) return false;
    }
    return true;
}

namespace {

std::uint64_t cube_key(std::uint32_t care, std::uint32_t value) {
    return (static_cast<std::uint64_t>(care) << 32) | value;
}

// Calls f(minterm) for every minterm of the cube.
template <typename F>
void for_each_minterm(const Cube& c, int input_bits, F&& f) {
    const std::uint32_t all = input_bits == 32 ? 0xFFFFFFFFu : ((1u << input_bits) - 1);
    const std::uint32_t free = all & ~c.care;
    std::uint32_t sub = 0;
    do {
        f(c.value | sub);
        sub = (sub - free) & free;
    } while (sub != 0);
}

using Bits = boost::dynamic_bitset<std::uint64_t>;

// Minimum-cardinality set cover by branch and bound with essential-column,
// row-dominance and column-dominance reductions. Columns are bitsets over rows.
class CoverSolver {
public:
    CoverSolver(std::size_t rows, std::vector<Bits> columns) : rows_(rows), columns_(std::move(columns)) {}

    std::vector<std::size_t> solve() {
        Bits uncovered(rows_);
        uncovered.set();
        std::vector<std::size_t> active(columns_.size());
        std::iota(active.begin(), active.end(), 0);
        best_ = greedy(uncovered, active);
        std::vector<std::size_t> chosen;
        search(uncovered, active, chosen);
        std::sort(best_.begin(), best_.end());
        return best_;
    }

    std::vector<std::size_t> greedy_only() {
        Bits uncovered(rows_);
        uncovered.set();
        std::vector<std::size_t> active(columns_.size());
        std::iota(active.begin(), active.end(), 0);
        auto result = greedy(uncovered, active);
        std::sort(result.begin(), result.end());
        return result;
    }

private:
    std::vector<std::size_t> greedy(Bits uncovered, const std::vector<std::size_t>& active) const {
        std::vector<std::size_t> picked;
        while (uncovered.any()) {
            std::size_t best_col = 0, best_gain = 0;
            for (auto c : active) {
                const auto gain = (columns_[c] & uncovered).count();
                if (gain > best_gain) {
                    best_gain = gain;
                    best_col = c;
                }
            }
            if (best_gain == 0) throw Error(ErrorCode::invalid_argument, "rows cannot be covered");
            picked.push_back(best_col);
            uncovered -= columns_[best_col];
        }
        // Drop columns made redundant by later picks.
        for (std::size_t i = picked.size(); i-- > 0;) {
            Bits others(rows_);
            for (std::size_t j = 0; j < picked.size(); ++j)
                if (j != i) others |= columns_[picked[j]];
            Bits all(rows_);
            all.set();
            if (others == all) picked.erase(picked.begin() + static_cast<std::ptrdiff_t>(i));
        }
        return picked;
    }

    // Returns false when some uncovered row has no column.
    bool reduce(Bits& uncovered, std::vector<std::size_t>& active, std::vector<std::size_t>& chosen) const {
        bool changed = true;
        while (changed && uncovered.any()) {
            changed = false;

            // Column dominance, including columns that cover nothing.
            std::vector<Bits> restricted;
            restricted.reserve(active.size());
            for (auto c : active) restricted.push_back(columns_[c] & uncovered);
            std::vector<bool> drop(active.size(), false);
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (restricted[i].none()) {
                    drop[i] = true;
                    continue;
                }
                for (std::size_t j = 0; j < active.size() && !drop[i]; ++j) {
                    if (i == j || drop[j]) continue;
                    if (restricted[i].is_subset_of(restricted[j]) && (restricted[i] != restricted[j] || j < i))
                        drop[i] = true;
                }
            }
            std::vector<std::size_t> kept;
            std::vector<Bits> kept_bits;
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (!drop[i]) {
                    kept.push_back(active[i]);
                    kept_bits.push_back(std::move(restricted[i]));
                } else {
                    changed = true;
                }
            }
            active.swap(kept);

            // Essential columns: rows with a single candidate.
            for (auto r = uncovered.find_first(); r != Bits::npos; r = uncovered.find_next(r)) {
                std::size_t count = 0, only = 0;
                for (std::size_t i = 0; i < active.size(); ++i) {
                    if (kept_bits[i][r]) {
                        ++count;
                        only = i;
                        if (count > 1) break;
                    }
                }
                if (count == 0) return false;
                if (count == 1) {
                    chosen.push_back(active[only]);
                    uncovered -= columns_[active[only]];
                    changed = true;
                    break;
                }
            }
            if (changed) continue;

            // Row dominance: a row whose candidates include another row's
            // candidates is covered whenever that row is.
            std::vector<std::size_t> rows;
            std::vector<Bits> row_cols;
            for (auto r = uncovered.find_first(); r != Bits::npos; r = uncovered.find_next(r)) {
                Bits cols(active.size());
                for (std::size_t i = 0; i < active.size(); ++i)
                    if (kept_bits[i][r]) cols.set(i);
                rows.push_back(r);
                row_cols.push_back(std::move(cols));
            }
            std::vector<bool> dominated(rows.size(), false);
            for (std::size_t a = 0; a < rows.size(); ++a) {
                for (std::size_t b = 0; b < rows.size() && !dominated[a]; ++b) {
                    if (a == b || dominated[b]) continue;
                    if (row_cols[b].is_subset_of(row_cols[a]) && (row_cols[a] != row_cols[b] || b < a))
                        dominated[a] = true;
                }
            }
            for (std::size_t a = 0; a < rows.size(); ++a) {
                if (dominated[a]) {
                    uncovered.reset(rows[a]);
                    changed = true;
                }
            }
        }
        return true;
    }

    // Rows pairwise sharing no column each need their own column.
    std::size_t lower_bound(const Bits& uncovered, const std::vector<std::size_t>& active) const {
        std::vector<std::pair<std::size_t, std::size_t>> order;  // (candidate count, row)
        for (auto r = uncovered.find_first(); r != Bits::npos; r = uncovered.find_next(r)) {
            std::size_t count = 0;
            for (auto c : active)
                if (columns_[c][r]) ++count;
            order.emplace_back(count, r);
        }
        std::sort(order.begin(), order.end());
        Bits blocked(rows_);
        std::size_t bound = 0;
        for (auto [count, r] : order) {
            if (blocked[r]) continue;
            ++bound;
            for (auto c : active)
                if (columns_[c][r]) blocked |= columns_[c];
        }
        return bound;
    }

    void search(Bits uncovered, std::vector<std::size_t> active, std::vector<std::size_t> chosen) {
        if (!reduce(uncovered, active, chosen)) return;
        if (chosen.size() >= best_.size()) return;
        if (uncovered.none()) {
            best_ = chosen;
            return;
        }
        if (chosen.size() + lower_bound(uncovered, active) >= best_.size()) return;

        // Branch on the row with the fewest candidate columns.
        std::size_t branch_row = 0, fewest = SIZE_MAX;
        for (auto r = uncovered.find_first(); r != Bits::npos; r = uncovered.find_next(r)) {
            std::size_t count = 0;
            for (auto c : active)
                if (columns_[c][r]) ++count;
            if (count < fewest) {
                fewest = count;
                branch_row = r;
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> candidates;  // (-gain, column)
        for (auto c : active) {
            if (columns_[c][branch_row])
                candidates.emplace_back(SIZE_MAX - (columns_[c] & uncovered).count(), c);
        }
        std::sort(candidates.begin(), candidates.end());
        std::vector<std::size_t> remaining = active;
        for (auto [_, c] : candidates) {
            auto next_chosen = chosen;
            next_chosen.push_back(c);
            search(uncovered - columns_[c], remaining, std::move(next_chosen));
            // Later branches exclude c; every cover using c was explored above.
            remaining.erase(std::find(remaining.begin(), remaining.end(), c));
            if (chosen.size() + 1 >= best_.size()) return;
        }
    }

    std::size_t rows_;
    std::vector<Bits> columns_;
    std::vector<std::size_t> best_;
};

}  // namespace

std::vector<Cube> prime_implicants(const TruthTable& table) {
    const int n = table.input_bits();
    const std::uint32_t full = n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1);

    std::unordered_map<std::uint64_t, std::uint32_t> level;  // key -> output tag
    for (std::uint32_t m = 0; m < table.row_count(); ++m) {
        const std::uint32_t tag = table.on(m) | table.dc(m);
        if (tag != 0) level.emplace(cube_key(full, m), tag);
    }

    std::vector<Cube> primes;
    while (!level.empty()) {
        std::unordered_map<std::uint64_t, std::uint32_t> next;
        std::unordered_set<std::uint64_t> merged_away;
        for (const auto& [key, tag] : level) {
            const auto care = static_cast<std::uint32_t>(key >> 32);
            const auto value = static_cast<std::uint32_t>(key);
            for (std::uint32_t bits = care; bits != 0; bits &= bits - 1) {
                const std::uint32_t bit = bits & (~bits + 1);
                if (value & bit) continue;
                const auto partner = level.find(cube_key(care, value | bit));
                if (partner == level.end()) continue;
                const std::uint32_t joint = tag & partner->second;
                if (joint == 0) continue;
                next.emplace(cube_key(care & ~bit, value), joint);
                if (joint == tag) merged_away.insert(key);
                if (joint == partner->second) merged_away.insert(partner->first);
            }
        }
        for (const auto& [key, tag] : level) {
            if (merged_away.count(key)) continue;
            primes.push_back({static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32), tag});
        }
        level.swap(next);
    }

    // Keep primes that cover an on-set point of some output they may feed.
    std::vector<Cube> useful;
    for (auto& p : primes) {
        std::uint32_t feeds = 0;
        for_each_minterm(p, n, [&](std::uint32_t m) { feeds |= table.on(m) & p.outputs; });
        if (feeds != 0) useful.push_back(p);
    }
    std::sort(useful.begin(), useful.end());
    return useful;
}

SopCover minimize_sop(const TruthTable& table, MinimizeMode mode) {
    const int budget = mode == MinimizeMode::exact ? kExactInputBudget : kHeuristicInputBudget;
    if (table.input_bits() > budget) {
        throw Error(ErrorCode::budget_exceeded, std::to_string(table.input_bits()) + " input bits exceed " +
                                                    std::to_string(budget));
    }
    const int n = table.input_bits();
    const auto primes = prime_implicants(table);

    // Rows of the covering problem: (minterm, output) pairs in the on-set.
    std::vector<std::uint32_t> row_base(table.row_count() + 1, 0);
    for (std::uint32_t m = 0; m < table.row_count(); ++m)
        row_base[m + 1] = row_base[m] + static_cast<std::uint32_t>(std::popcount(table.on(m)));
    const std::size_t rows = row_base.back();

    auto row_index = [&](std::uint32_t m, int o) {
        const std::uint32_t below = table.on(m) & ((1u << o) - 1);
        return row_base[m] + static_cast<std::uint32_t>(std::popcount(below));
    };

    std::vector<Bits> columns;
    columns.reserve(primes.size());
    for (const auto& p : primes) {
        Bits col(rows);
        for_each_minterm(p, n, [&](std::uint32_t m) {
            for (std::uint32_t outs = table.on(m) & p.outputs; outs != 0; outs &= outs - 1)
                col.set(row_index(m, std::countr_zero(outs)));
        });
        columns.push_back(std::move(col));
    }

    SopCover cover;
    cover.exact = mode == MinimizeMode::exact;
    cover.per_output.resize(static_cast<std::size_t>(table.output_bits()));
    if (rows == 0) return cover;

    CoverSolver solver(rows, columns);
    const auto picked = mode == MinimizeMode::exact ? solver.solve() : solver.greedy_only();
    for (auto idx : picked) {
        Cube c = primes[idx];
        std::uint32_t feeds = 0;
        for_each_minterm(c, n, [&](std::uint32_t m) { feeds |= table.on(m) & c.outputs; });
        c.outputs = feeds;
        for (std::uint32_t outs = feeds; outs != 0; outs &= outs - 1)
            cover.per_output[static_cast<std::size_t>(std::countr_zero(outs))].push_back(cover.terms.size());
        cover.terms.push_back(c);
    }
    cover.term_count = cover.terms.size();
    return cover;
}

std::string asymptotic_tag(const std::vector<std::int64_t>& coeffs) {
    std::size_t nonzero = 0;
    bool unit = true;
    for (auto c : coeffs) {
        if (c == 0) continue;
        ++nonzero;
        if (c != 1 && c != -1) unit = false;
    }
    if (nonzero == 0) return "Theta(1)";
    if (nonzero == 1) return unit ? "Theta(log b)" : "Theta(b)";
    return "Theta(b^" + std::to_string(nonzero) + ")";
}

WidthResult combinatorial_width(const WidthQuery& query, MinimizeMode mode) {
    const auto table = build_digit_op_table(query.coeffs, query.base, query.include_carry_in);
    const auto cover = minimize_sop(table, mode);
    return {cover.term_count, cover.exact, asymptotic_tag(query.coeffs)};
}

double log_log_slope(const std::vector<int>& bases, const std::vector<std::size_t>& counts) {
    if (bases.size() != counts.size()) throw Error(ErrorCode::invalid_argument, "bases and counts differ in length");
    std::vector<int> distinct(bases);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw Error(ErrorCode::degenerate_fit, "a slope needs two distinct bases");
    double mx = 0, my = 0;
    const double k = static_cast<double>(bases.size());
    for (std::size_t i = 0; i < bases.size(); ++i) {
        if (counts[i] == 0) throw Error(ErrorCode::degenerate_fit, "zero count has no logarithm");
        mx += std::log(static_cast<double>(bases[i]));
        my += std::log(static_cast<double>(counts[i]));
    }
    mx /= k;
    my /= k;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        const double dx = std::log(static_cast<double>(bases[i])) - mx;
        sxy += dx * (std::log(static_cast<double>(counts[i])) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

WidthGrowth estimate_width_growth(const std::vector<std::int64_t>& coeffs, const std::vector<int>& bases,
                                  bool include_carry_in) {
    std::vector<int> distinct(bases);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw Error(ErrorCode::degenerate_fit, "a slope needs two distinct bases");

    WidthGrowth growth;
    growth.bases = bases;
    for (int b : bases)
        growth.counts.push_back(combinatorial_width({coeffs, b, include_carry_in}).term_count);
    growth.slope = log_log_slope(growth.bases, growth.counts);
    growth.strictly_increasing = true;
    for (std::size_t i = 1; i < bases.size(); ++i) {
        if (bases[i] <= bases[i - 1] || growth.counts[i] <= growth.counts[i - 1])
            growth.strictly_increasing = false;
    }
    return growth;
}

std::size_t compound_width(const std::vector<std::size_t>& widths) {
    if (widths.empty()) throw Error(ErrorCode::empty_list, "compound width of no functions");
    return std::accumulate(widths.begin(), widths.end(), std::size_t{0});
}

void write_truth_table(std::ostream& out, const TruthTable& table) {
    for (std::uint32_t row = 0; row < table.row_count(); ++row) {
        for (int i = 0; i < table.input_bits(); ++i) out << (((row >> i) & 1) ? '1' : '0');
        out << ' ';
        for (int o = 0; o < table.output_bits(); ++o) {
            const std::uint32_t bit = 1u << o;
            out << ((table.dc(row) & bit) ? '-' : ((table.on(row) & bit) ? '1' : '0'));
        }
        out << '\n';
    }
}

TruthTable read_truth_table(std::istream& in) {
    std::string line;
    std::vector<std::pair<std::string, std::string>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string inputs, outputs, extra;
        if (!(fields >> inputs >> outputs) || (fields >> extra))
            throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected two fields");
        rows.emplace_back(inputs, outputs);
    }
    if (rows.empty()) throw Error(ErrorCode::parse_error, "empty truth table");
    const int n = static_cast<int>(rows.front().first.size());
    const int m = static_cast<int>(rows.front().second.size());
    TruthTable table(n, m);
    std::vector<bool> seen(table.row_count(), false);
    for (const auto& [inputs, outputs] : rows) {
        if (static_cast<int>(inputs.size()) != n || static_cast<int>(outputs.size()) != m)
            throw Error(ErrorCode::parse_error, "inconsistent row width");
        std::uint32_t index = 0;
        for (int i = 0; i < n; ++i) {
            if (inputs[i] == '1')
                index |= 1u << i;
            else if (inputs[i] != '0')
                throw Error(ErrorCode::parse_error, "input bits must be 0 or 1");
        }
        std::uint32_t on = 0, dc = 0;
        for (int o = 0; o < m; ++o) {
            switch (outputs[o]) {
            case '1': on |= 1u << o; break;
            case '-': dc |= 1u << o; break;
            case '0': break;
            default: throw Error(ErrorCode::parse_error, "output bits must be 0, 1 or -");
            }
        }
        if (seen[index]) throw Error(ErrorCode::parse_error, "duplicate row " + inputs);
        seen[index] = true;
        table.set_row(index, on, dc);
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw Error(ErrorCode::parse_error, "table does not list every input assignment");
    return table;
}

}  // namespace nsp
