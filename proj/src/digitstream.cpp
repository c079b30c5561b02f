#include "nsp/digitstream.hpp"

namespace nsp {

std::string_view to_string(TaskKind kind) {
    switch (kind) {
    case TaskKind::fixed_difference: return "fixed_difference";
    case TaskKind::arithmetic: return "arithmetic";
    case TaskKind::fibonacci: return "fibonacci";
    case TaskKind::geometric: return "geometric";
    case TaskKind::reverse: return "reverse";
    }
    return "unknown";
}

TaskKind parse_task_kind(std::string_view text) {
    for (auto kind : {TaskKind::fixed_difference, TaskKind::arithmetic, TaskKind::fibonacci,
                      TaskKind::geometric, TaskKind::reverse}) {
        if (to_string(kind) == text) return kind;
    }
    throw Error(ErrorCode::unknown_kind, "'" + std::string(text) + "'");
}

void validate(const StreamConfig& config) {
    if (config.n < 1 || config.s < 1) throw Error(ErrorCode::invalid_argument, "n and s must be >= 1");
    if (config.b < 2 || config.b > 36) throw Error(ErrorCode::invalid_argument, "base must lie in [2, 36]");
}

const std::vector<DigitTaskEntry>& list_digit_catalog() {
    static const std::vector<DigitTaskEntry> catalog = [] {
        const SplitSpec train{0, 4000, SplitRole::train};
        const SplitSpec val{4000, 6000, SplitRole::validation};
        return std::vector<DigitTaskEntry>{
            {"diff17-digit", TaskKind::fixed_difference, SequenceRule::fixed_difference(17),
             {0, 9000, SplitRole::train}, {9000, 9900, SplitRole::validation}},
            {"arith-digit", TaskKind::arithmetic, SequenceRule::linear({2, -1}), train, val},
            {"fib-digit", TaskKind::fibonacci, SequenceRule::linear({1, 1}), train, val},
            {"geometric-digit", TaskKind::geometric, SequenceRule::rounded_geometric(13, 10), train,
             val},
            {"reverse", TaskKind::reverse, SequenceRule::reverse(), {1, 13, SplitRole::train},
             {16, 17, SplitRole::validation}},
        };
    }();
    return catalog;
}

const DigitTaskEntry* find_digit_entry(std::string_view name) {
    for (const auto& entry : list_digit_catalog())
        if (entry.name == name) return &entry;
    return nullptr;
}

const DigitTaskEntry& digit_entry(TaskKind kind) {
    for (const auto& entry : list_digit_catalog())
        if (entry.kind == kind) return entry;
    throw Error(ErrorCode::unknown_kind, std::string(to_string(kind)));
}

TokenStream token_stream(const SequenceRule& rule, std::span<const Term> initial_terms, int base,
                         std::size_t min_length) {
    validate(rule);
    if (rule.kind == RuleKind::reverse_order)
        throw Error(ErrorCode::invalid_argument, "reverse_order has no numeric terms");
    if (initial_terms.size() != rule.order())
        throw Error(ErrorCode::arity_mismatch, "initial term count differs from the rule order");
    TokenStream out;
    // Terms are produced one at a time so that a negative term beyond the
    // needed prefix never rejects an otherwise valid stream.
    std::size_t next_initial = 0;
    while (out.tokens.size() < min_length) {
        Term term = next_initial < initial_terms.size() ? initial_terms[next_initial++]
                                                        : next_term(rule, out.terms);
        if (term < 0) throw Error(ErrorCode::negative_term, "initial term " + to_decimal(term));
        for (int d : digits_le_minimal(term, base)) out.tokens.push_back(d);
        out.tokens.push_back(blank_token(base));
        out.terms.push_back(std::move(term));
    }
    return out;
}

DigitInstance make_digit_instance_from_terms(TaskKind kind, const SequenceRule& rule,
                                             std::span<const Term> initial_terms,
                                             const StreamConfig& config) {
    validate(config);
    if (kind == TaskKind::reverse)
        throw Error(ErrorCode::invalid_argument, "reverse instances come from make_reverse_instance");
    const auto stream = token_stream(rule, initial_terms, config.b, config.n + config.s);

    DigitInstance inst;
    inst.kind = kind;
    inst.rule = rule;
    inst.initial_terms.assign(initial_terms.begin(), initial_terms.end());
    inst.n = config.n;
    inst.s = config.s;
    inst.base = config.b;
    const Token delim = delimiter_token(config.b);
    inst.input.assign(stream.tokens.begin(), stream.tokens.begin() + static_cast<std::ptrdiff_t>(config.n));
    inst.input.insert(inst.input.end(), config.s, delim);
    inst.target.assign(config.n, delim);
    inst.target.insert(inst.target.end(), stream.tokens.begin() + static_cast<std::ptrdiff_t>(config.n),
                       stream.tokens.begin() + static_cast<std::ptrdiff_t>(config.n + config.s));
    return inst;
}

DigitInstance make_digit_instance(TaskKind kind, const StreamConfig& config, const SplitSpec& split,
                                  SeedContext seed) {
    if (kind == TaskKind::reverse)
        throw Error(ErrorCode::invalid_argument, "reverse instances come from make_reverse_instance");
    validate(config);
    const SequenceRule& rule = digit_entry(kind).rule;
    CounterRng rng(seed);
    for (std::size_t attempt = 0; attempt < kMaxDigitResamples; ++attempt) {
        const auto init = sample_initial_terms(split, rule.order(), rng);
        try {
            auto inst = make_digit_instance_from_terms(kind, rule, init, config);
            inst.role = split.role;
            inst.seed = seed;
            return inst;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::negative_term) throw;
        }
    }
    throw Error(ErrorCode::unsatisfiable_config,
                std::string(to_string(kind)) + ": no non-negative sequence after " +
                    std::to_string(kMaxDigitResamples) + " draws");
}

DigitInstance make_reverse_instance_from_digits(std::span<const int> digits, int base) {
    if (digits.empty()) throw Error(ErrorCode::invalid_argument, "reverse needs m >= 1");
    validate(StreamConfig{1, 1, base});
    const std::size_t m = digits.size();
    const Token delim = delimiter_token(base);
    DigitInstance inst;
    inst.kind = TaskKind::reverse;
    inst.rule = SequenceRule::reverse();
    inst.n = m;
    inst.s = m;
    inst.base = base;
    for (int d : digits) {
        if (d < 0 || d >= base) throw Error(ErrorCode::invalid_argument, "digit out of range");
    }
    inst.input.assign(digits.begin(), digits.end());
    inst.input.insert(inst.input.end(), m, delim);
    inst.target.assign(m, delim);
    inst.target.insert(inst.target.end(), digits.rbegin(), digits.rend());
    return inst;
}

namespace {
DigitInstance reverse_from_rng(std::size_t m, int base, CounterRng& rng) {
    if (m < 1) throw Error(ErrorCode::invalid_argument, "reverse needs m >= 1");
    std::vector<int> digits(m);
    for (auto& d : digits) d = static_cast<int>(rng.uniform(0, base));
    return make_reverse_instance_from_digits(digits, base);
}
}  // namespace

DigitInstance make_reverse_instance(std::size_t m, int base, SeedContext seed) {
    CounterRng rng(seed);
    auto inst = reverse_from_rng(m, base, rng);
    inst.seed = seed;
    return inst;
}

DigitInstance make_reverse_instance(const SplitSpec& m_range, int base, SeedContext seed) {
    if (m_range.lower < 1) throw Error(ErrorCode::invalid_argument, "reverse needs m >= 1");
    CounterRng rng(seed);
    const auto m = static_cast<std::size_t>(rng.uniform(m_range.lower, m_range.upper));
    auto inst = reverse_from_rng(m, base, rng);
    inst.role = m_range.role;
    inst.seed = seed;
    return inst;
}

std::vector<Term> decode_stream_terms(std::span<const Token> tokens, int base) {
    std::vector<Term> terms;
    std::vector<int> digits;
    for (Token t : tokens) {
        if (t == blank_token(base)) {
            if (digits.empty()) throw Error(ErrorCode::malformed_stream, "blank without digits");
            terms.push_back(from_digits_le(digits, base));
            digits.clear();
        } else if (t >= 0 && t < base) {
            digits.push_back(t);
        } else {
            break;
        }
    }
    return terms;
}

}  // namespace nsp
