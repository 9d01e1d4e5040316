#include "malvol/error.hpp"

namespace malvol {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::HypothesisViolation: return "HypothesisViolation";
        case ErrorCode::NonPositiveDenominator: return "NonPositiveDenominator";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::FloorSaturation: return "FloorSaturation";
        case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::FailureBudgetExceeded: return "FailureBudgetExceeded";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace malvol
