#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbb {

enum class ErrorCode {
    invalid_input,
    numerical_failure,
    divergence_detected,
    unsupported_kind,
    precondition_failed,
    missing_iterates,
    oracle_failed,
    parse_error,
    io_error,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fbb
