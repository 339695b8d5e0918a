#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poscon {

enum class ErrorCode {
    SingularMatrix,
    NotSymmetric,
    Overflow,
    NonFinite,
    DimensionMismatch,
    UnsupportedDimension,
    InvalidGraph,
    InvalidSchedule,
    InvalidArgument,
    NoSolution,
    Infeasible,
    InvariantViolation,
    DisconnectedGraph,
    NonnegativityViolation,
    NonFiniteState,
    MissingCertificate,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. The code lets callers (and the CLI
/// exit-status mapping) branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace poscon
