#include "mfp/error.hpp"

namespace mfp {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::NonpositivePrice: return "NonpositivePrice";
    case ErrorCode::HorizonOutOfRange: return "HorizonOutOfRange";
    case ErrorCode::StepSizeTooLarge: return "StepSizeTooLarge";
    case ErrorCode::FixedPointDivergence: return "FixedPointDivergence";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::BranchCrossing: return "BranchCrossing";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::NotOscillatory: return "NotOscillatory";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::Io: return "IoError";
    }
    return "Unknown";
}

} // namespace mfp
