#pragma once

// Combinatorial width of digit operations: truth tables over binary-coded
// digits, exact multi-output two-level minimization, and width growth fits.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsp/error.hpp"

namespace nsp {

inline constexpr int kExactInputBudget = 16;
inline constexpr int kHeuristicInputBudget = 20;
inline constexpr int kMaxOutputs = 32;

// Layout of a table produced by build_digit_op_table. Input variable order:
// operand 0 bits (LSB first), operand 1 bits, ..., then carry-in bits.
// Output order: result digit bits (LSB first), then carry-out bits.
// Carries are stored offset by their minimum value.
struct DigitEncoding {
    int base = 10;
    int arity = 2;
    int bits_per_digit = 4;
    bool carry_in = false;
    int carry_in_bits = 0;
    int carry_in_min = 0;
    int carry_in_max = 0;
    int carry_out_bits = 0;
    int carry_out_min = 0;
    int carry_out_max = 0;
};

class TruthTable {
public:
    TruthTable() = default;
    // All rows start as 0 with no don't-cares.
    TruthTable(int input_bits, int output_bits);

    int input_bits() const { return input_bits_; }
    int output_bits() const { return output_bits_; }
    std::size_t row_count() const { return on_.size(); }

    // Output masks: bit o of on() is output o; dc() marks don't-care outputs.
    std::uint32_t on(std::size_t row) const { return on_[row]; }
    std::uint32_t dc(std::size_t row) const { return dc_[row]; }
    void set_row(std::size_t row, std::uint32_t on, std::uint32_t dc);
    void set_dont_care(std::size_t row) { set_row(row, 0, output_mask()); }
    std::uint32_t output_mask() const;

    const std::optional<DigitEncoding>& encoding() const { return encoding_; }
    void set_encoding(DigitEncoding e) { encoding_ = e; }

    bool operator==(const TruthTable& other) const {
        return input_bits_ == other.input_bits_ && output_bits_ == other.output_bits_ &&
               on_ == other.on_ && dc_ == other.dc_;
    }

private:
    int input_bits_ = 0;
    int output_bits_ = 0;
    std::vector<std::uint32_t> on_;
    std::vector<std::uint32_t> dc_;
    std::optional<DigitEncoding> encoding_;
};

int bits_for(int values);

// Truth table of one digit position of sum(coeffs[i] * d_i) (+ carry-in).
// Codes that are not valid digits or carries are don't-care rows.
// Throws budget_exceeded past kExactInputBudget inputs.
TruthTable build_digit_op_table(const std::vector<std::int64_t>& coeffs, int base, bool include_carry_in);

// Cube over the input variables: variable i is a literal iff bit i of care is
// set, with polarity given by bit i of value. outputs lists the outputs the
// product term feeds.
struct Cube {
    std::uint32_t value = 0;
    std::uint32_t care = 0;
    std::uint32_t outputs = 0;

    bool contains(std::uint32_t minterm) const { return (minterm & care) == value; }
    int literal_count() const;
    std::string to_string(int input_bits) const;
    auto operator<=>(const Cube&) const = default;
};

enum class MinimizeMode { exact, heuristic };

struct SopCover {
    std::vector<Cube> terms;
    std::size_t term_count = 0;
    bool exact = true;  // false: term_count is only an upper bound
    // per_output[o] lists indices into terms that feed output o.
    std::vector<std::vector<std::size_t>> per_output;

    std::uint32_t evaluate(std::uint32_t input) const;
};

// Throws budget_exceeded when the table is too wide for the mode.
SopCover minimize_sop(const TruthTable& table, MinimizeMode mode = MinimizeMode::exact);

// True iff cover matches the table on every care output of every row.
bool cover_matches(const SopCover& cover, const TruthTable& table);

// Multi-output prime implicants restricted to those covering some on-set point.
std::vector<Cube> prime_implicants(const TruthTable& table);

struct WidthQuery {
    std::vector<std::int64_t> coeffs;
    int base = 10;
    bool include_carry_in = true;
};

struct WidthResult {
    std::size_t term_count = 0;
    bool exact = true;
    std::string asymptotic_tag;  // e.g. "Theta(b^2)"
};

WidthResult combinatorial_width(const WidthQuery& query, MinimizeMode mode = MinimizeMode::exact);

// Declared growth class of a linear digit operation: b^k for k non-zero
// operands, log b for a single +-1 copy.
std::string asymptotic_tag(const std::vector<std::int64_t>& coeffs);

struct WidthGrowth {
    std::vector<int> bases;
    std::vector<std::size_t> counts;
    double slope = 0;  // least-squares slope of log(count) over log(base)
    bool strictly_increasing = false;
};

// Throws degenerate_fit for fewer than two distinct bases.
WidthGrowth estimate_width_growth(const std::vector<std::int64_t>& coeffs, const std::vector<int>& bases,
                                  bool include_carry_in = true);

double log_log_slope(const std::vector<int>& bases, const std::vector<std::size_t>& counts);

// Throws empty_list.
std::size_t compound_width(const std::vector<std::size_t>& widths);

// Plain text format: one line per row, input bits (variable 0 first), a
// space, output bits (output 0 first) with '-' for don't-care.
void write_truth_table(std::ostream& out, const TruthTable& table);
// Throws parse_error on malformed or incomplete tables.
TruthTable read_truth_table(std::istream& in);

}  // namespace nsp
