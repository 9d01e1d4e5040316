#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace malvol {

enum class ErrorCode {
    InvalidArgument,
    InvalidGrid,
    LengthMismatch,
    HypothesisViolation,
    NonPositiveDenominator,
    Overflow,
    FloorSaturation,
    EmptyEnsemble,
    TooFewSamples,
    GridTooCoarse,
    FailureBudgetExceeded,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library exception. Guard violations on a single path (denominator,
/// overflow, floor saturation) are thrown with their own code so the
/// ensemble driver can count them against the failure budget.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace malvol
