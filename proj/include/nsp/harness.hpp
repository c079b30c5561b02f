#pragma once

// Scoring of predictions against targets, split hygiene checks and
// per-position error maps.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsp/dataset.hpp"

namespace nsp {

inline constexpr std::size_t kValidationSetSize = 1024;

// Index of the largest entry; ties go to the lowest index. Throws empty_vector.
std::size_t argmax_decode(std::span<const double> probabilities);

// One instance to score. For number-level cases `target` is the s x l grid
// flattened row-major with `cols` = l. For digit-level cases `target` is the
// full n+s token target and the first `leading` tokens (delimiters) are
// checked but never counted.
struct ScoringCase {
    std::vector<int> predicted;
    std::vector<int> target;
    std::size_t cols = 0;
    std::size_t leading = 0;
};

using PositionKey = std::pair<std::size_t, std::size_t>;  // (row, column)

struct EvalReport {
    TaskLevel level = TaskLevel::number;
    std::uint64_t total_predictions = 0;
    std::uint64_t wrong_predictions = 0;
    // wrong / total reduced; 0/1 when nothing was scored.
    std::uint64_t rate_num = 0;
    std::uint64_t rate_den = 1;
    // Per scored position: errors and totals. Digit-level rows are always 0
    // and columns count from the first scored token.
    std::map<PositionKey, std::uint64_t> position_errors;
    std::map<PositionKey, std::uint64_t> position_totals;
    // Wrong scored positions per instance, in input order.
    std::vector<std::uint64_t> instance_errors;
    // Digit-level instances whose leading tokens were not all delimiters.
    std::vector<std::size_t> delimiter_violations;

    double error_rate() const { return static_cast<double>(rate_num) / static_cast<double>(rate_den); }
    std::string rate_fraction() const;
    // Decimal rendering rounded half-up to `places` digits.
    std::string rate_decimal(int places = 6) const;
};

// Throws shape_mismatch when a prediction's length differs from its target.
EvalReport error_rate(std::span<const ScoringCase> cases, TaskLevel level, int delimiter = -1);

// Only positions with at least one error appear.
std::map<PositionKey, std::uint64_t> position_breakdown(std::span<const ScoringCase> cases, TaskLevel level);

// Text grid of error counts (number-level) or a single row (digit-level).
std::string render_breakdown(const EvalReport& report);

// Decodes a prediction file against a dataset. Probabilities are reduced
// with argmax_decode. Throws shape_mismatch listing missing, unknown or
// duplicated ids and wrong lengths.
std::vector<ScoringCase> align_predictions(const Dataset& dataset, const PredictionFile& predictions);

EvalReport evaluate(const Dataset& dataset, const PredictionFile& predictions);

struct SplitViolation {
    std::optional<std::size_t> id;  // unset for dataset-wide violations
    std::string message;
};

// Every instance's initial terms (m for reverse) must lie in the declared
// range of the dataset's role, the header must declare that range and the
// declared train and validation ranges must be disjoint. Throws
// missing_metadata when an instance lacks its initial terms or m.
std::vector<SplitViolation> check_split(const Dataset& dataset, const SplitSpec& train,
                                        const SplitSpec& validation);

// Declared ranges for a catalog task. Throws unknown_kind.
std::pair<SplitSpec, SplitSpec> declared_splits(std::string_view task);

}  // namespace nsp
