#pragma once

#include <stdexcept>
#include <string>

namespace mlab {

// Error taxonomy for the whole library.  Every throw site uses one of these
// codes so callers (CLI, tests) can react to the condition rather than parse
// message strings.
enum class ErrorCode {
    OutOfFamily,          // (a,b) parameters match no supported Hamiltonian case
    OutsideAnnulus,       // energy level h not interior to the requested period annulus
    OutsideArc,           // x not within the oval's [x_A, x_B] span
    NegativeRadicand,     // y^2 formula evaluated negative beyond tolerance
    CriticalAbscissa,     // H_x(x,0) vanishes where 1/H_x is required
    UnsupportedIndex,     // monomial exponents outside the configured range
    NonConvergence,       // adaptive quadrature failed to reach tolerance
    DegreeTooSmall,       // perturbation degree below the theorem's range
    DegenerateElimination,// both elimination multipliers vanish identically
    NoKernel,             // synthesis linear system has trivial kernel
    EventStall,           // ODE event localization exceeded iteration budget
    Blowup,               // ODE trajectory left the safety region
    ZeroPolynomial,       // root counting asked on the identically-zero polynomial
    BadInput,             // malformed user input (JSON, CLI arguments)
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::OutOfFamily: return "OutOfFamily";
    case ErrorCode::OutsideAnnulus: return "OutsideAnnulus";
    case ErrorCode::OutsideArc: return "OutsideArc";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::CriticalAbscissa: return "CriticalAbscissa";
    case ErrorCode::UnsupportedIndex: return "UnsupportedIndex";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::DegenerateElimination: return "DegenerateElimination";
    case ErrorCode::NoKernel: return "NoKernel";
    case ErrorCode::EventStall: return "EventStall";
    case ErrorCode::Blowup: return "Blowup";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

} // namespace mlab
