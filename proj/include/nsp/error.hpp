#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsp {

enum class ErrorCode {
    invalid_argument,
    negative_term,
    arity_mismatch,
    overflow,
    empty_range,
    unsatisfiable_config,
    malformed_one_hot,
    register_overflow,
    stack_underflow,
    malformed_stream,
    unknown_kind,
    budget_exceeded,
    empty_list,
    degenerate_fit,
    no_plan_found,
    empty_vector,
    shape_mismatch,
    missing_metadata,
    parse_error,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nsp
