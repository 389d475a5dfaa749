#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcs {

enum class ErrorCode {
    LengthMismatch,
    DimMismatch,
    InvalidDims,
    SOutOfRange,
    TooManySupports,
    ZeroColumn,
    NegativeEta,
    LayoutMismatch,
    RankDeficient,
    InfeasibleProblem,
    DeltaOutOfRange,
    DegenerateDenominator,
    InvalidArgument,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every precondition or contract failure in the library is reported with
/// this exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qcs
