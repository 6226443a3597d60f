// perturbative.hpp: low-finesse corrections around the single-mode polaritons of a
// three-mode (q = -1, 0, +1) arrowhead matrix.
#pragma once

#include "mmpol/model.hpp"

#include <utility>

namespace mmpol {

// d_{-1}, d_{+1}, e_{-1}, e_0, e_{+1}, p of a (3+1) arrowhead matrix.
struct ThreeModeArrowhead {
    cplx d_minus, d_plus;
    cplx e_minus, e_zero, e_plus;
    cplx p;
    double kappa0 = 0.0;

    // Requires MatrixForm::arrowhead with basis (q=-1, q=0, q=+1, X).
    static ThreeModeArrowhead from_matrix(const DynamicalMatrix& matrix);
    double scale() const;
};

// p - lambda + e_0^2/lambda - e_{-1}^2/(d_{-1} - lambda) - e_{+1}^2/(d_{+1} - lambda).
// Throws PoleError at lambda in {0, d_{-1}, d_{+1}}.
cplx phi(cplx lambda, const DynamicalMatrix& matrix);
cplx phi(cplx lambda, const ThreeModeArrowhead& a);

// Single-mode roots of lambda (p - lambda) + e_0^2 = 0, lower real part first.
std::pair<cplx, cplx> single_mode_roots(const ThreeModeArrowhead& a);

// Denominator of the linearised correction, including p terms.
cplx linearization_denominator(cplx lambda, const ThreeModeArrowhead& a);

struct PerturbativeResult {
    cplx x_minus, x_plus;          // corrections to the LP and UP roots
    cplx lambda_lp, lambda_up;     // single-mode root + correction, frame-relative
    double E_LP = 0.0, E_UP = 0.0;  // frame-relative, eV
    double Gamma_LP = 0.0, Gamma_UP = 0.0;
    double Omega_R = 0.0;
};

// Linearised roots of Phi around the single-mode pair. p = 0 uses the reduced denominator.
// Throws DomainError when the denominator is numerically singular.
PerturbativeResult x_correction(const DynamicalMatrix& matrix);

// 2 Omega [1 - Omega^2 (Omega^2 + Delta^2) / ((Omega^2 + Delta^2)^2 + Delta^2 zeta^2)].
double splitting_linear_zeta(double rabi, double fsr, double zeta);

struct BandwidthPair {
    double lp = 0.0;
    double up = 0.0;
};

// kappa -/+ 2 Omega Omega^2 Delta zeta / ((Omega^2 + Delta^2)^2 + Delta^2 zeta^2) for LP/UP.
BandwidthPair bandwidths_linear_zeta(double rabi, double fsr, double zeta, double kappa);

// Closed forms for Re x and 2 Im x with equal couplings and per-mode bandwidth mismatches,
// evaluated exactly as published. They are not dimensionally consistent with the
// linearised solution and are only reported next to it.
struct PrintedCorrections {
    double re_x_minus = 0.0, re_x_plus = 0.0;
    double two_im_x_minus = 0.0, two_im_x_plus = 0.0;
};
PrintedCorrections printed_corrections(double rabi, double fsr, double dk_minus, double dk_plus);

// The exact polariton pair closest to the perturbative estimate, with the gaps.
struct ExactComparison {
    cplx lambda_lp, lambda_up;
    double Omega_R = 0.0;
    double abs_gap = 0.0;  // max |lambda_exact - lambda_perturbative| over LP, UP
    double rel_gap_splitting = 0.0;
};
ExactComparison compare_with_exact(const DynamicalMatrix& matrix, const PerturbativeResult& result);

}  // namespace mmpol
