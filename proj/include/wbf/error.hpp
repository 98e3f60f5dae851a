#pragma once

#include <stdexcept>
#include <string>

namespace wbf {

enum class Errc {
    NegativeInteriorMass,
    MassImbalance,
    NegativeDensity,
    ParseError,
    GridMismatch,
    InvalidExponent,
    PreconditionViolated,
    SolverDiverged,
    InfeasibleScheme,
    NonFiniteState,
    GridTooCoarse,
    InfiniteEnergy,
};

inline const char* errc_name(Errc c) {
    switch (c) {
    case Errc::NegativeInteriorMass: return "NegativeInteriorMass";
    case Errc::MassImbalance: return "MassImbalance";
    case Errc::NegativeDensity: return "NegativeDensity";
    case Errc::ParseError: return "ParseError";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::SolverDiverged: return "SolverDiverged";
    case Errc::InfeasibleScheme: return "InfeasibleScheme";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::InfiniteEnergy: return "InfiniteEnergy";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace wbf
