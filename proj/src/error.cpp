#include "qcs/error.hpp"

namespace qcs {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::TooManySupports: return "TooManySupports";
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::NegativeEta: return "NegativeEta";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InfeasibleProblem: return "InfeasibleProblem";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace qcs
