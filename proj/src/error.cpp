#include "poscon/error.hpp"

namespace poscon {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NonnegativityViolation: return "NonnegativityViolation";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::MissingCertificate: return "MissingCertificate";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace poscon
