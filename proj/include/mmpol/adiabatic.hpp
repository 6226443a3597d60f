// adiabatic.hpp: high-finesse elimination of far-detuned cavity modes.
//
// Off-resonant modes (q != 0) follow the dipoles quasi-statically and leave behind
// one-body shifts/decays and two-body couplings/losses on the emitters. The formulas
// below are the closed forms of that elimination, written exactly as
//
//   G''_j  = -sum_{q!=0} |g_jq|^2        D_q     / (D_q^2 + (dk_q/2)^2)
//   J''_ij = -sum_{q!=0} g*_iq g_jq     (D_q/2)  / (D_q^2 + (dk_q/2)^2)
//   G'_j   = -sum_{q!=0} |g_jq|^2       (dk_q/2) / (D_q^2 + (dk_q/2)^2)
//   J'_ij  = -sum_{q!=0} g*_iq g_jq     (dk_q/2) / (D_q^2 + (dk_q/2)^2)
//
// with D_q = Delta_q the detuning from the reference mode and dk_q the bandwidth mismatch.

#pragma once

#include "mmpol/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mmpol {

struct AdiabaticCorrections {
    std::vector<double> gamma_prime;   // G'_j, eV
    std::vector<double> gamma_dprime;  // G''_j, eV
    Eigen::MatrixXcd j_prime;          // J'_ij, eV
    Eigen::MatrixXcd j_dprime;         // J''_ij, eV

    // Collective (Dicke) quantities. one_body_* are G'_j, G''_j of any emitter.
    double one_body_decay = 0.0;
    double one_body_shift = 0.0;
    double collective_loss = 0.0;   // N J'
    double collective_shift = 0.0;  // N J''

    double delta_N = 0.0;        // delta_0 - G'' - N J''
    double delta_Gamma_N = 0.0;  // -dgamma/2 + G' + N J'
    bool thermodynamic_limit = true;
};

struct EffectiveOptions {
    // Drop the one-body terms G', G'' (N -> infinity at fixed Omega_0).
    bool thermodynamic_limit = true;
};

double one_body_shift(const SystemSpec& spec, int j);             // G''_j
cplx two_body_coupling(const SystemSpec& spec, int i, int j);     // J''_ij
double one_body_decay(const SystemSpec& spec, int j);             // G'_j
cplx two_body_loss(const SystemSpec& spec, int i, int j);         // J'_ij

// Bundles the corrections for a Dicke spec into delta_N and dGamma_N.
// Throws UnsupportedReduction for heterogeneous specs.
AdiabaticCorrections effective_parameters(const SystemSpec& spec, EffectiveOptions options = {});

// Omega_R = Re sqrt((NJ'' - delta_0 - i (NJ' - dgamma/2))^2 + 4 Omega_0^2).
double rabi_splitting_adiabatic(double collective_shift, double collective_loss, double delta0,
                                double decay_mismatch, double rabi0);
double rabi_splitting_adiabatic(const SystemSpec& spec);

struct TwoBodyRate {
    double exact = 0.0;        // (Omega_{-1}^2 - Omega_{+1}^2) (zeta/2) / (Delta^2 + zeta^2/4)
    double approximate = 0.0;  // zeta f Omega_0^2 / (Delta^2 + zeta^2/4), the printed closed form
};

// NJ' for the symmetric three-mode model Omega_{+/-1} = Omega_0 (1 +/- f), Delta_{+/-1} = +/-Delta,
// kappa_q = kappa_0 + q zeta. The two forms differ by a factor of -2; both are returned.
TwoBodyRate nj_prime_homogeneous(double rabi0, double f, double fsr, double zeta);

}  // namespace mmpol
