#pragma once

// Exact term generation for sequence rules, little-endian digit codecs and
// reproducible sampling of initial terms.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsp/error.hpp"

namespace nsp {

using BigInt = boost::multiprecision::cpp_int;
using Term = BigInt;

enum class RuleKind { linear_recurrence, fixed_difference, rounded_geometric, reverse_order };

std::string_view to_string(RuleKind kind);

struct SequenceRule {
    RuleKind kind = RuleKind::linear_recurrence;
    // c_1..c_k, c_1 multiplies the most recent term.
    std::vector<std::int64_t> coefficients;
    std::int64_t difference = 0;
    std::uint64_t ratio_num = 1;
    std::uint64_t ratio_den = 1;

    static SequenceRule linear(std::vector<std::int64_t> coefficients);
    static SequenceRule fixed_difference(std::int64_t difference);
    static SequenceRule rounded_geometric(std::uint64_t num, std::uint64_t den);
    static SequenceRule reverse();

    // Number of initial terms the rule consumes; 0 for reverse_order.
    std::size_t order() const;

    bool operator==(const SequenceRule&) const = default;
};

// Throws invalid_argument when the rule's fields break its invariants.
void validate(const SequenceRule& rule);

// The term following `history`; throws negative_term.
Term next_term(const SequenceRule& rule, std::span<const Term> history);

// Returns exactly `count` terms starting with `initial_terms`.
// Throws arity_mismatch, negative_term.
std::vector<Term> eval_recurrence(const SequenceRule& rule, std::span<const Term> initial_terms,
                                  std::size_t count);

// Least significant digit first, zero padded to `width`. Throws overflow.
std::vector<int> digits_le(const Term& term, int base, std::size_t width);

// Minimal little-endian expansion; zero yields {0}.
std::vector<int> digits_le_minimal(const Term& term, int base);

Term from_digits_le(std::span<const int> digits, int base);

enum class SplitRole { train, validation };

std::string_view to_string(SplitRole role);
SplitRole parse_split_role(std::string_view text);

// Half-open range [lower, upper) for every sampled initial term.
struct SplitSpec {
    std::int64_t lower = 0;
    std::int64_t upper = 0;
    SplitRole role = SplitRole::train;

    bool contains(const Term& value) const { return value >= lower && value < upper; }
    bool overlaps(const SplitSpec& other) const {
        return lower < other.upper && other.lower < upper;
    }
    bool operator==(const SplitSpec&) const = default;
};

struct SeedContext {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    bool operator==(const SeedContext&) const = default;
};

std::uint64_t mix64(std::uint64_t x);

// Counter-based generator: word i of stream (master, id) is
// mix64(stream_key + (i + 1) * golden), with
// stream_key = mix64(mix64(master) ^ mix64(id + golden)).
// Any instance can be regenerated from its SeedContext alone.
class CounterRng {
public:
    explicit CounterRng(SeedContext seed);

    std::uint64_t next();
    // Uniform in [lower, upper) by rejection; upper > lower.
    std::int64_t uniform(std::int64_t lower, std::int64_t upper);
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Throws empty_range.
std::vector<Term> sample_initial_terms(const SplitSpec& split, std::size_t arity, CounterRng& rng);
std::vector<Term> sample_initial_terms(const SplitSpec& split, std::size_t arity, SeedContext seed);

std::string to_decimal(const Term& value);

}  // namespace nsp
