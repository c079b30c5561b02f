#pragma once

// Digit-level tasks: one token per time step over {0..b-1, blank, delimiter}.
//
// Stream layout (format version 1): every term is written as its minimal
// little-endian expansion followed by one blank. The input is the first n
// stream tokens followed by s delimiters; the target is n delimiters followed
// by stream tokens n..n+s-1. The cut may fall inside a term.

#include <optional>
#include <string>
#include <vector>

#include "nsp/core.hpp"

namespace nsp {

using Token = int;

constexpr Token blank_token(int base) { return base; }
constexpr Token delimiter_token(int base) { return base + 1; }
constexpr int alphabet_size(int base) { return base + 2; }

inline constexpr int kStreamLayoutVersion = 1;
inline constexpr std::string_view kStreamLayout = "blank-after-term";

enum class TaskKind { fixed_difference, arithmetic, fibonacci, geometric, reverse };

std::string_view to_string(TaskKind kind);
// Accepts the kind names above. Throws unknown_kind.
TaskKind parse_task_kind(std::string_view text);

struct StreamConfig {
    std::size_t n = 12;
    std::size_t s = 12;
    int b = 10;
    bool operator==(const StreamConfig&) const = default;
};

void validate(const StreamConfig& config);

struct DigitInstance {
    TaskKind kind = TaskKind::fixed_difference;
    SequenceRule rule;
    std::vector<Term> initial_terms;
    std::vector<Token> input;
    std::vector<Token> target;
    std::size_t n = 0;  // leading input tokens (m for reverse)
    std::size_t s = 0;  // scored continuation tokens (m for reverse)
    int base = 10;
    SplitRole role = SplitRole::train;
    SeedContext seed;
};

struct DigitTaskEntry {
    std::string name;
    TaskKind kind;
    SequenceRule rule;
    // For reverse the ranges bound the digit count m instead of a term.
    SplitSpec train;
    SplitSpec validation;

    const SplitSpec& split(SplitRole role) const {
        return role == SplitRole::train ? train : validation;
    }
};

const std::vector<DigitTaskEntry>& list_digit_catalog();
const DigitTaskEntry* find_digit_entry(std::string_view name);
const DigitTaskEntry& digit_entry(TaskKind kind);

struct TokenStream {
    std::vector<Token> tokens;
    std::vector<Term> terms;  // the complete terms the tokens encode
};

// Whole terms are appended until at least min_length tokens exist.
TokenStream token_stream(const SequenceRule& rule, std::span<const Term> initial_terms, int base,
                         std::size_t min_length);

// Builds one instance from explicit initial terms; throws negative_term.
DigitInstance make_digit_instance_from_terms(TaskKind kind, const SequenceRule& rule,
                                             std::span<const Term> initial_terms,
                                             const StreamConfig& config);

// Numeric kinds only. Throws unsatisfiable_config after kMaxDigitResamples draws.
DigitInstance make_digit_instance(TaskKind kind, const StreamConfig& config, const SplitSpec& split,
                                  SeedContext seed);

inline constexpr std::size_t kMaxDigitResamples = 100000;

DigitInstance make_reverse_instance_from_digits(std::span<const int> digits, int base);
DigitInstance make_reverse_instance(std::size_t m, int base, SeedContext seed);
// Draws m uniformly from the split's range, then the digits.
DigitInstance make_reverse_instance(const SplitSpec& m_range, int base, SeedContext seed);

// Splits the digit tokens of a stream at blanks and decodes every complete term.
std::vector<Term> decode_stream_terms(std::span<const Token> tokens, int base);

}  // namespace nsp
