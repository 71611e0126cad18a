#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace folcomp {

/// Failure categories raised by the solver. Report-only conditions (leaf
/// truncation, clamped images, floored Perron norms) are carried as flags on
/// the result types instead.
enum class ErrorCode {
    SpecInvalid,
    EvalAtSingular,
    DegenerateDy,
    NormDiverging,
    L2Violated,
    NotPositive,
    OrderMismatch,
    OrderUnsupported,
    NearSingularDenominator,
    DenominatorBreach,
    NoConvergence,
    LeafEscapes,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace folcomp
