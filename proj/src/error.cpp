#include "folcomp/error.hpp"

namespace folcomp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::EvalAtSingular: return "EvalAtSingular";
    case ErrorCode::DegenerateDy: return "DegenerateDy";
    case ErrorCode::NormDiverging: return "NormDiverging";
    case ErrorCode::L2Violated: return "L2Violated";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::OrderUnsupported: return "OrderUnsupported";
    case ErrorCode::NearSingularDenominator: return "NearSingularDenominator";
    case ErrorCode::DenominatorBreach: return "DenominatorBreach";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LeafEscapes: return "LeafEscapes";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace folcomp
