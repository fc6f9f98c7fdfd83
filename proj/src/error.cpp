#include "qbl/error.hpp"

namespace qbl {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::RankError: return "rank-error";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::StateInvalid: return "state-invalid";
    case ErrorCode::DegeneratePushforward: return "degenerate-pushforward";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::KindMismatch: return "kind-mismatch";
    case ErrorCode::UnknownCapacity: return "unknown-capacity";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

} // namespace qbl
