// validate.hpp: invariant suite and the numerical studies it is built from.
#pragma once

#include "mmpol/model.hpp"
#include "mmpol/observables.hpp"
#include "mmpol/spectra.hpp"
#include "mmpol/sweep.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace mmpol {

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;  // y ~ prefactor * x^exponent
};

// Least squares on log y against log x. Requires positive data.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceStudy {
    std::vector<double> ratio;  // coupling over mode spacing
    std::vector<double> error;
    PowerLawFit fit;
    // max error / ratio^power over the study.
    double bound_constant(double power) const;
};

// Relative error of the linear-zeta splitting formula against the exact solver,
// Delta varied geometrically so that Omega/Delta spans [lo, hi].
ConvergenceStudy linear_zeta_study(double rabi, double zeta, double lo = 0.05, double hi = 0.35, int points = 15);
// Relative size of the exact multimode correction |Omega_R - 2 Omega| / (2 Omega) over the same sweep.
ConvergenceStudy multimode_correction_study(double rabi, double zeta, double lo = 0.05, double hi = 0.35, int points = 15);
// Largest complex-eigenvalue gap between the effective 2x2 polaritons and the exact pair.
ConvergenceStudy adiabatic_study(double rabi0, double zeta, double lo = 0.02, double hi = 0.2, int points = 12);

// Labelled spectra along one parameter, labels carried by nearest-neighbour tracking from the anchor.
std::vector<SpectrumSummary> track_along(const ThreeModeSetup& base, const std::string& parameter,
                                         const std::vector<double>& values, bool from_stop);

// Largest |NJ'| over the figure-2 grid (201 x 201 over [-0.1, 0.1]^2).
struct TwoBodyScan {
    double max_abs_exact = 0.0;
    double max_abs_printed = 0.0;
    double max_ratio_printed_to_exact = 0.0;  // over points where exact != 0
};
TwoBodyScan two_body_scan(bool lower_coupled, int count = 201);

// Dicke spec with modes q in [-lo, M-1-lo], mode spacings near one eV and random
// couplings, detunings and rates in physical ranges.
SystemSpec random_dicke_spec(std::mt19937_64& rng, int modes, int emitters = 1);

struct CheckResult {
    std::string name;
    bool passed = false;
    bool gating = true;  // informational checks never fail the suite
    std::string detail;
    std::map<std::string, double> metrics;
};

struct ValidateOptions {
    std::uint64_t seed = 1;
    int random_specs = 200;
    // Mutation hook: evaluate bandwidths with the opposite sign convention.
    bool flip_bandwidth_sign = false;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

ValidationReport run_validation(const ValidateOptions& options = {});
std::string report_json(const ValidationReport& report);

}  // namespace mmpol
