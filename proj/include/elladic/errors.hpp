#pragma once

#include <stdexcept>
#include <string>

namespace elladic {

// Failure classes map to process exit codes: validation -> 2,
// precision -> 3, math -> 4.
enum class ErrorKind {
    Validation,

    // precision
    PrecisionExhausted,
    BudgetExceeded,

    // mathematical failures
    NonUnit,
    VarMismatch,
    NotContracting,
    DegreeTooHigh,
    NotClosed,
    NoSolution,
    NotACycle,
    NotACocycle,
    NotABoundary,
    TooLarge,
    DepthZero,
    NotInK1,
    NoRoot,
    BadExponent,
    OutsideRegion,
    CertificateMismatch,
    CongruenceTooWeak,
    NormViolation,
    Inconclusive,
    NoIntertwiner,
    NonInvertibleOnly,
    NotCompatible,
    DeterminantMismatch,
    Degenerate,
};

const char* error_kind_name(ErrorKind k);
int error_exit_code(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
          m_kind(kind) {}

    ErrorKind kind() const { return m_kind; }
    int exit_code() const { return error_exit_code(m_kind); }

private:
    ErrorKind m_kind;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace elladic
