#include "interfere/error.hpp"

namespace interfere {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedProfile: return "malformed-profile";
        case ErrorKind::Calibration: return "calibration";
        case ErrorKind::UnitMismatch: return "unit-mismatch";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::DegreesOfFreedom: return "degrees-of-freedom";
        case ErrorKind::Collinearity: return "collinearity";
        case ErrorKind::UndefinedCorrelation: return "undefined-correlation";
        case ErrorKind::Config: return "config";
        case ErrorKind::Communication: return "communication";
        case ErrorKind::CoExecution: return "co-execution";
        case ErrorKind::EmptyPlan: return "empty-plan";
        case ErrorKind::UnknownLabel: return "unknown-label";
        case ErrorKind::Load: return "load";
    }
    return "unknown";
}

int error_exit_code(ErrorKind kind) noexcept {
    // 1 is reserved for usage errors reported by the argument parser.
    return 2 + static_cast<int>(kind);
}

}  // namespace interfere
