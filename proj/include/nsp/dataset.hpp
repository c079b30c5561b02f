#pragma once

// JSON-lines dataset and prediction files.
//
// Dataset: line 1 is the header, then one instance per line with ids
// 0..count-1. Number-level grids are flattened row-major (n*l input cells,
// s*l target cells); digit-level instances carry flat token arrays of length
// n+s. Every line is compact JSON terminated by a single LF.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsp/core.hpp"
#include "nsp/digitstream.hpp"
#include "nsp/numgrid.hpp"

namespace nsp {

inline constexpr int kFormatVersion = 1;

enum class TaskLevel { number, digit };

std::string_view to_string(TaskLevel level);

struct DatasetHeader {
    int format_version = kFormatVersion;
    std::string task;
    TaskLevel level = TaskLevel::number;
    int base = 10;
    // Unset for reverse, where both equal the per-instance m.
    std::optional<std::size_t> n;
    std::optional<std::size_t> l;  // number-level only
    std::optional<std::size_t> s;
    SplitSpec split;
    std::uint64_t master_seed = 0;
    std::size_t count = 0;

    bool operator==(const DatasetHeader&) const = default;
};

struct DatasetInstance {
    std::size_t id = 0;
    std::vector<Term> initial_terms;  // empty for reverse
    SequenceRule rule;
    std::optional<std::size_t> m;               // reverse only
    std::optional<std::size_t> mixture_choice;  // mixture entries only
    std::vector<int> input;
    std::vector<int> target;

    bool operator==(const DatasetInstance&) const = default;
};

struct Dataset {
    DatasetHeader header;
    std::vector<DatasetInstance> instances;

    // Leading input tokens of instance i (n, or m for reverse).
    std::size_t leading(std::size_t i) const;
    // Scored positions of instance i: s*l cells or s (m) tokens.
    std::size_t scored(std::size_t i) const;
};

struct GenerateRequest {
    std::string task;
    SplitRole role = SplitRole::train;
    std::size_t count = 32;
    std::uint64_t seed = 0;
    // Overrides of the task's defaults.
    std::optional<std::size_t> n;
    std::optional<std::size_t> l;
    std::optional<std::size_t> s;
    std::optional<int> base;
};

// Instance i is drawn from stream (seed, i). Throws unknown_kind for tasks
// outside both catalogs, unsatisfiable_config from the generators.
Dataset generate_dataset(const GenerateRequest& request);

void write_dataset(std::ostream& out, const Dataset& dataset);
std::string dataset_to_string(const Dataset& dataset);
// Throws parse_error on malformed lines, missing_metadata on absent fields.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

// 64-bit FNV-1a over the canonical serialization, as 16 hex digits.
std::string dataset_fingerprint(const Dataset& dataset);

enum class PredictionMode { tokens, probs };

struct PredictionRecord {
    std::size_t id = 0;
    std::vector<int> tokens;                // tokens mode
    std::vector<std::vector<double>> probs;  // probs mode, one vector per cell
};

struct PredictionFile {
    std::string dataset_ref;
    PredictionMode mode = PredictionMode::tokens;
    std::vector<PredictionRecord> records;
};

void write_predictions(std::ostream& out, const PredictionFile& file);
PredictionFile read_predictions(std::istream& in);
PredictionFile read_predictions_file(const std::string& path);

}  // namespace nsp
