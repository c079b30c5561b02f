#pragma once

// Complexity and difficulty of a linear digit operation: the fewest binary
// linear operations (A, B) -> pA + qB whose composition computes the target
// form, and the smallest compound width among those compositions.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsp/core.hpp"

namespace nsp {

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

// Leaf when op_p == 0 (then `variable` names the input, 0 = A = A_{n-1}).
struct PlanNode {
    std::int64_t op_p = 0;
    std::int64_t op_q = 0;
    std::size_t variable = 0;
    std::size_t width = 0;  // width of this node's operation
    PlanPtr left;
    PlanPtr right;

    bool is_leaf() const { return op_p == 0; }
};

struct DecompositionPlan {
    std::size_t arity = 0;
    PlanPtr root;

    std::size_t function_count() const;
    std::size_t compound_width() const;
    // Member widths in post-order.
    std::vector<std::size_t> widths() const;
    // Coefficients of the linear form the tree computes.
    std::vector<std::int64_t> form() const;
    BigInt evaluate(std::span<const BigInt> inputs) const;
    // Left-deep: every operation has at least one leaf operand.
    bool is_chain() const;
    std::string to_string() const;
};

struct ComplexityOptions {
    std::int64_t coeff_bound = 8;
    std::size_t max_functions = 4;
    // Member widths come from the exact minimizer at this base over one digit
    // position. Carry chains are excluded from the count by default: with a
    // free carry-in, large coefficient pairs take far too long to minimize.
    int width_base = 4;
    bool width_carry_in = false;
    // Explicit catalog of (p, q) operations; empty means every pair with
    // 1 <= |p|, |q| <= coeff_bound.
    std::vector<std::pair<std::int64_t, std::int64_t>> catalog;
};

struct ComplexityResult {
    std::size_t complexity = 0;
    std::size_t difficulty = 0;
    DecompositionPlan plan;
    // Same search restricted to chains; nullopt if none within max_functions.
    std::optional<std::size_t> chain_complexity;
    std::optional<std::size_t> chain_difficulty;
};

// Throws invalid_argument for arity outside [1, 4] or a zero target,
// no_plan_found when nothing fits within max_functions.
ComplexityResult complexity_search(const std::vector<std::int64_t>& target,
                                   const ComplexityOptions& options = {});

}  // namespace nsp
