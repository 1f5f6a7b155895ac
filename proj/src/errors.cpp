#include "elladic/errors.hpp"

namespace elladic {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Validation: return "Validation";
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::NonUnit: return "NonUnit";
        case ErrorKind::VarMismatch: return "VarMismatch";
        case ErrorKind::NotContracting: return "NotContracting";
        case ErrorKind::DegreeTooHigh: return "DegreeTooHigh";
        case ErrorKind::NotClosed: return "NotClosed";
        case ErrorKind::NoSolution: return "NoSolution";
        case ErrorKind::NotACycle: return "NotACycle";
        case ErrorKind::NotACocycle: return "NotACocycle";
        case ErrorKind::NotABoundary: return "NotABoundary";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::DepthZero: return "DepthZero";
        case ErrorKind::NotInK1: return "NotInK1";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::BadExponent: return "BadExponent";
        case ErrorKind::OutsideRegion: return "OutsideRegion";
        case ErrorKind::CertificateMismatch: return "CertificateMismatch";
        case ErrorKind::CongruenceTooWeak: return "CongruenceTooWeak";
        case ErrorKind::NormViolation: return "NormViolation";
        case ErrorKind::Inconclusive: return "Inconclusive";
        case ErrorKind::NoIntertwiner: return "NoIntertwiner";
        case ErrorKind::NonInvertibleOnly: return "NonInvertibleOnly";
        case ErrorKind::NotCompatible: return "NotCompatible";
        case ErrorKind::DeterminantMismatch: return "DeterminantMismatch";
        case ErrorKind::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

int error_exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Validation:
            return 2;
        case ErrorKind::PrecisionExhausted:
        case ErrorKind::BudgetExceeded:
            return 3;
        default:
            return 4;
    }
}

} // namespace elladic
