// observables.hpp: plotted quantities derived from labelled branches.
#pragma once

#include "mmpol/model.hpp"
#include "mmpol/spectra.hpp"

#include <map>
#include <optional>
#include <vector>

namespace mmpol {

struct SpectrumSummary {
    std::optional<double> omega_R;  // E_UP - E_LP
    std::optional<double> E_LP, E_UP;
    std::optional<double> Gamma_LP, Gamma_UP;
    std::optional<double> exciton_fraction_LP, exciton_fraction_UP;
    std::map<int, double> photon_fractions_LP, photon_fractions_UP;

    // Single-mode references: 2 Omega_0 and (kappa_0 + gamma)/2.
    double omega_R_single_mode = 0.0;
    double Gamma_single_mode = 0.0;

    bool has_LP() const noexcept { return E_LP.has_value(); }
    bool has_UP() const noexcept { return E_UP.has_value(); }
};

// Missing LP or UP labels leave the corresponding fields empty.
SpectrumSummary summarize(const std::vector<PolaritonBranch>& branches, const SystemSpec& spec);

// omega_{-1} + epsilon and omega_{+1} - epsilon; everything else unchanged.
// Throws DomainError if either shifted mode reaches the reference mode.
SystemSpec mode_shift_scan(const SystemSpec& spec, double epsilon);

// The same system with every q != 0 mode removed.
SystemSpec reference_mode_only(const SystemSpec& spec);

}  // namespace mmpol
