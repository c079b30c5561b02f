#include "nsp/core.hpp"

namespace nsp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::negative_term: return "NegativeTerm";
    case ErrorCode::arity_mismatch: return "ArityMismatch";
    case ErrorCode::overflow: return "Overflow";
    case ErrorCode::empty_range: return "EmptyRange";
    case ErrorCode::unsatisfiable_config: return "UnsatisfiableConfig";
    case ErrorCode::malformed_one_hot: return "MalformedOneHot";
    case ErrorCode::register_overflow: return "RegisterOverflow";
    case ErrorCode::stack_underflow: return "StackUnderflow";
    case ErrorCode::malformed_stream: return "MalformedStream";
    case ErrorCode::unknown_kind: return "UnknownKind";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::empty_list: return "EmptyList";
    case ErrorCode::degenerate_fit: return "DegenerateFit";
    case ErrorCode::no_plan_found: return "NoPlanFound";
    case ErrorCode::empty_vector: return "EmptyVector";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::missing_metadata: return "MissingMetadata";
    case ErrorCode::parse_error: return "ParseError";
    }
    return "Unknown";
}

std::string_view to_string(RuleKind kind) {
    switch (kind) {
    case RuleKind::linear_recurrence: return "linear_recurrence";
    case RuleKind::fixed_difference: return "fixed_difference";
    case RuleKind::rounded_geometric: return "rounded_geometric";
    case RuleKind::reverse_order: return "reverse_order";
    }
    return "unknown";
}

SequenceRule SequenceRule::linear(std::vector<std::int64_t> coefficients) {
    SequenceRule rule;
    rule.kind = RuleKind::linear_recurrence;
    rule.coefficients = std::move(coefficients);
    validate(rule);
    return rule;
}

SequenceRule SequenceRule::fixed_difference(std::int64_t difference) {
    SequenceRule rule;
    rule.kind = RuleKind::fixed_difference;
    rule.difference = difference;
    return rule;
}

SequenceRule SequenceRule::rounded_geometric(std::uint64_t num, std::uint64_t den) {
    SequenceRule rule;
    rule.kind = RuleKind::rounded_geometric;
    rule.ratio_num = num;
    rule.ratio_den = den;
    validate(rule);
    return rule;
}

SequenceRule SequenceRule::reverse() {
    SequenceRule rule;
    rule.kind = RuleKind::reverse_order;
    return rule;
}

std::size_t SequenceRule::order() const {
    switch (kind) {
    case RuleKind::linear_recurrence: return coefficients.size();
    case RuleKind::fixed_difference:
    case RuleKind::rounded_geometric: return 1;
    case RuleKind::reverse_order: return 0;
    }
    return 0;
}

void validate(const SequenceRule& rule) {
    switch (rule.kind) {
    case RuleKind::linear_recurrence:
        if (rule.coefficients.empty())
            throw Error(ErrorCode::invalid_argument, "linear recurrence needs order >= 1");
        break;
    case RuleKind::rounded_geometric:
        if (rule.ratio_den == 0 || rule.ratio_num == 0)
            throw Error(ErrorCode::invalid_argument, "ratio terms must be positive");
        break;
    case RuleKind::fixed_difference:
    case RuleKind::reverse_order: break;
    }
}

Term next_term(const SequenceRule& rule, std::span<const Term> history) {
    const std::size_t order = rule.order();
    if (rule.kind == RuleKind::reverse_order || history.size() < order)
        throw Error(ErrorCode::arity_mismatch, "history shorter than the rule order");
    Term next;
    const std::size_t last = history.size() - 1;
    switch (rule.kind) {
    case RuleKind::linear_recurrence:
        for (std::size_t i = 0; i < order; ++i) next += history[last - i] * rule.coefficients[i];
        break;
    case RuleKind::fixed_difference: next = history[last] + rule.difference; break;
    case RuleKind::rounded_geometric:
        // Terms are non-negative, so integer division is the floor.
        next = history[last] * rule.ratio_num / rule.ratio_den;
        break;
    case RuleKind::reverse_order: break;
    }
    if (next < 0) {
        throw Error(ErrorCode::negative_term,
                    "term " + std::to_string(history.size()) + " = " + to_decimal(next));
    }
    return next;
}

std::vector<Term> eval_recurrence(const SequenceRule& rule, std::span<const Term> initial_terms,
                                  std::size_t count) {
    validate(rule);
    if (rule.kind == RuleKind::reverse_order)
        throw Error(ErrorCode::invalid_argument, "reverse_order has no numeric terms");
    const std::size_t order = rule.order();
    if (initial_terms.size() != order) {
        throw Error(ErrorCode::arity_mismatch, "expected " + std::to_string(order) +
                                                   " initial terms, got " +
                                                   std::to_string(initial_terms.size()));
    }
    if (count < order)
        throw Error(ErrorCode::arity_mismatch, "count smaller than the rule order");

    std::vector<Term> terms(initial_terms.begin(), initial_terms.end());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i] < 0)
            throw Error(ErrorCode::negative_term, "initial term " + std::to_string(i) + " < 0");
    }
    terms.reserve(count);
    while (terms.size() < count) terms.push_back(next_term(rule, terms));
    return terms;
}

static void check_base(int base) {
    if (base < 2 || base > 36)
        throw Error(ErrorCode::invalid_argument, "base must lie in [2, 36]");
}

std::vector<int> digits_le(const Term& term, int base, std::size_t width) {
    check_base(base);
    if (term < 0) throw Error(ErrorCode::negative_term, "cannot encode " + to_decimal(term));
    std::vector<int> digits(width, 0);
    Term rest = term;
    for (std::size_t i = 0; i < width && rest != 0; ++i) {
        digits[i] = static_cast<int>(rest % base);
        rest /= base;
    }
    if (rest != 0) {
        throw Error(ErrorCode::overflow, to_decimal(term) + " needs more than " +
                                             std::to_string(width) + " base-" +
                                             std::to_string(base) + " digits");
    }
    return digits;
}

std::vector<int> digits_le_minimal(const Term& term, int base) {
    check_base(base);
    if (term < 0) throw Error(ErrorCode::negative_term, "cannot encode " + to_decimal(term));
    if (term == 0) return {0};
    std::vector<int> digits;
    Term rest = term;
    while (rest != 0) {
        digits.push_back(static_cast<int>(rest % base));
        rest /= base;
    }
    return digits;
}

Term from_digits_le(std::span<const int> digits, int base) {
    Term value = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) value = value * base + *it;
    return value;
}

std::string_view to_string(SplitRole role) {
    return role == SplitRole::train ? "train" : "val";
}

SplitRole parse_split_role(std::string_view text) {
    if (text == "train") return SplitRole::train;
    if (text == "val" || text == "validation") return SplitRole::validation;
    throw Error(ErrorCode::invalid_argument, "unknown split role '" + std::string(text) + "'");
}

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

CounterRng::CounterRng(SeedContext seed)
    : key_(mix64(mix64(seed.master_seed) ^ mix64(seed.stream_id + kGolden))) {}

std::uint64_t CounterRng::next() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

std::int64_t CounterRng::uniform(std::int64_t lower, std::int64_t upper) {
    if (upper <= lower) throw Error(ErrorCode::empty_range, "uniform over an empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(upper) - static_cast<std::uint64_t>(lower);
    // Largest multiple of range that fits in 2^64; draws at or above it are rejected.
    const std::uint64_t limit = range * (UINT64_MAX / range);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lower) + x % range);
}

std::vector<Term> sample_initial_terms(const SplitSpec& split, std::size_t arity, CounterRng& rng) {
    if (split.upper <= split.lower) {
        throw Error(ErrorCode::empty_range, "[" + std::to_string(split.lower) + ", " +
                                                std::to_string(split.upper) + ")");
    }
    std::vector<Term> terms;
    terms.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i) terms.emplace_back(rng.uniform(split.lower, split.upper));
    return terms;
}

std::vector<Term> sample_initial_terms(const SplitSpec& split, std::size_t arity, SeedContext seed) {
    CounterRng rng(seed);
    return sample_initial_terms(split, arity, rng);
}

std::string to_decimal(const Term& value) {
    return value.str();
}

}  // namespace nsp
