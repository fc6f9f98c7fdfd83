#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbl {

enum class ErrorCode {
    InvalidArgument,
    RankError,
    DomainError,
    StateInvalid,
    DegeneratePushforward,
    NumericalFailure,
    ParseError,
    KindMismatch,
    UnknownCapacity,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library error categories.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace qbl
