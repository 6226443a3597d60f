#pragma once

#include <stdexcept>
#include <string>

namespace mmpol {

// Inconsistent or physically invalid system description.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A reduction (Dicke, arrowhead, adiabatic) was requested for a system that does not admit it.
class UnsupportedReduction : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameter outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A non-reference mode is degenerate with the reference mode (zero detuning and zero bandwidth mismatch).
class SingularModeError : public std::domain_error {
public:
    SingularModeError(int q, const std::string& what)
        : std::domain_error(what), mode_(q) {}
    int mode() const noexcept { return mode_; }

private:
    int mode_;
};

// Evaluation exactly at (or numerically on top of) a pole of a rational function.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations)
        : std::runtime_error(what), iterations_(iterations) {}
    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

// Integrator refused the requested step; suggested_dt satisfies the stability rule.
class StepSizeError : public std::invalid_argument {
public:
    StepSizeError(const std::string& what, double suggested_dt)
        : std::invalid_argument(what), suggested_(suggested_dt) {}
    double suggested_dt() const noexcept { return suggested_; }

private:
    double suggested_;
};

}  // namespace mmpol
