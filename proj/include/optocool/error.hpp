// error.hpp: Exception type shared by all optocool modules

#pragma once

#include <stdexcept>
#include <string>

namespace optocool {

enum class ErrorKind {
    Parse,               // malformed configuration text or CLI override
    Validation,          // parameter invariants violated
    Degenerate,          // zero decay and zero detuning on a coupled channel
    NoPhysicalRoot,      // steady-state cubic without a non-negative root
    PoleAtGrid,          // response denominator evaluated on an undamped pole
    SingularMatrix,      // oracle susceptibility matrix not invertible
    InfeasibleDetuning,  // optimal coupling requested for delta2_eff > omega_m
    Unstable,            // heating rate not smaller than cooling rate
    TruncationOverflow,  // Fock-space truncation tail exceeded during evolution
    EmptySweep,
    UnknownFigure,
    InvariantBreach,     // internal consistency check failed
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::Validation: return "ValidationError";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::NoPhysicalRoot: return "NoPhysicalRoot";
        case ErrorKind::PoleAtGrid: return "PoleAtGrid";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::InfeasibleDetuning: return "InfeasibleDetuning";
        case ErrorKind::Unstable: return "Unstable";
        case ErrorKind::TruncationOverflow: return "TruncationOverflow";
        case ErrorKind::EmptySweep: return "EmptySweep";
        case ErrorKind::UnknownFigure: return "UnknownFigure";
        case ErrorKind::InvariantBreach: return "InvariantBreach";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace optocool
