#pragma once

// Number-level tasks: each term is a row of l little-endian digits.

#include <optional>
#include <string>
#include <vector>

#include "nsp/core.hpp"

namespace nsp {

struct GridConfig {
    std::size_t n = 8;  // input rows
    std::size_t l = 8;  // digits per row
    std::size_t s = 4;  // target rows
    int b = 10;

    bool operator==(const GridConfig&) const = default;
};

void validate(const GridConfig& config, std::size_t rule_order);

// Row-major rows x cols matrix of digit indices.
struct DigitMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> cells;

    DigitMatrix() = default;
    DigitMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0) {}

    int& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
    int at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
    std::span<const int> row(std::size_t r) const { return {cells.data() + r * cols, cols}; }

    bool operator==(const DigitMatrix&) const = default;
};

struct NumberGridInstance {
    SequenceRule rule;
    std::vector<Term> initial_terms;
    DigitMatrix input;   // n x l
    DigitMatrix target;  // s x l
    SplitRole role = SplitRole::train;
    SeedContext seed;
    // Index into the mixture members when the catalog entry is a mixture.
    std::optional<std::size_t> mixture_choice;
};

struct RuleCatalogEntry {
    std::string name;
    std::vector<SequenceRule> rules;  // one rule, or the members of a mixture
    bool mixture = false;
    int declared_complexity = 1;
    SplitSpec train;
    SplitSpec validation;
    int default_base = 10;
    std::vector<int> base_variants;  // extra bases the entry is declared for

    const SplitSpec& split(SplitRole role) const {
        return role == SplitRole::train ? train : validation;
    }
};

// The eight number-level families, in catalog order.
const std::vector<RuleCatalogEntry>& list_rule_catalog();
const RuleCatalogEntry* find_rule_entry(std::string_view name);

// Encodes the first n+s terms; throws negative_term, overflow, arity_mismatch.
NumberGridInstance make_number_grid_from_terms(const SequenceRule& rule,
                                               std::span<const Term> initial_terms,
                                               const GridConfig& config);

// Samples initial terms until every one of the n+s terms is non-negative and
// fits in l digits. Throws unsatisfiable_config after kMaxResamples draws.
NumberGridInstance make_number_grid_instance(const RuleCatalogEntry& entry, const GridConfig& config,
                                             const SplitSpec& split, SeedContext seed);

inline constexpr std::size_t kMaxResamples = 100000;

// rows x cols x channels, channel index fastest.
struct OneHotTensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t channels = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(std::size_t r, std::size_t c, std::size_t ch) const {
        return data[(r * cols + c) * channels + ch];
    }
    std::uint8_t& at(std::size_t r, std::size_t c, std::size_t ch) {
        return data[(r * cols + c) * channels + ch];
    }
    bool operator==(const OneHotTensor&) const = default;
};

OneHotTensor onehot_encode(const DigitMatrix& digits, int base);
// Throws malformed_one_hot unless every cell has exactly one active channel.
DigitMatrix onehot_decode(const OneHotTensor& tensor);

}  // namespace nsp
