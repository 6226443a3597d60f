// oracle.hpp: brute-force time propagation of the amplitude equations and
// harmonic inversion of the resulting signals.
#pragma once

#include "mmpol/adiabatic.hpp"
#include "mmpol/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mmpol {

enum class OutputFrame { lab, rotating };

struct PropagationOptions {
    OutputFrame output = OutputFrame::lab;
    // Integrate the lab-frame equations directly instead of the rotating ones.
    bool integrate_in_lab = false;
    // Keep every k-th step.
    int store_every = 1;
};

struct Trajectory {
    std::vector<double> times;    // 1/eV
    Eigen::MatrixXcd amplitudes;  // rows are times, columns follow `basis`
    std::vector<double> norm_series;  // lab-frame sum |c|^2
    std::vector<BasisLabel> basis;
    Frame frame;
    OutputFrame output = OutputFrame::lab;
    double spectral_bound = 0.0;  // bound on |lambda| of the rotating generator, eV
};

// Largest rate in the rotating equations: max(|Delta_q|, coupling norms, kappa_q, gamma_i, |delta_i|).
double rate_scale(const SystemSpec& spec);

// Fixed-step RK4 of the single-excitation amplitudes. `initial` has M+N entries (modes by
// ascending q, then emitters) or, for Dicke specs, M+1 entries (modes, then X).
// Throws StepSizeError when dt > 0.05 / rate_scale (lab integration also counts omega_0).
Trajectory propagate(const SystemSpec& spec, const Eigen::VectorXcd& initial, double t_final, double dt,
                     PropagationOptions options = {});

struct Horizon {
    double t_final = 0.0;
    double dt = 0.0;
};

// t_final = 50 / min(kappa_q, gamma_i, Omega_0) over the positive ones, capped at 1e5 steps.
Horizon default_horizon(const SystemSpec& spec);

struct FrequencyFit {
    std::vector<cplx> lambdas;  // frame-relative, sorted by real part
    bool low_confidence = false;
    double relative_residual = 0.0;
};

// Linear-prediction estimate of n complex frequencies shared by all channels, refined by
// Gauss-Newton on the full trajectory.
FrequencyFit fit_complex_frequencies(const Trajectory& trajectory, int n_expected);

struct AdiabaticReport {
    bool in_regime = true;  // every q != 0 mode passes the quasi-static criterion
    double horizon = 0.0;   // 1 / Omega_0
    double coupling_ratio = 0.0;  // Omega_0 / min |Delta_q|
    double deviation_reduced = 0.0;  // full vs quasi-static (1+N) equations
    std::optional<double> deviation_two_level;  // full vs effective 2x2 (Dicke specs)
};

// Initial state: the bright emitter combination with every q != 0 mode on its quasi-static value.
AdiabaticReport verify_adiabatic(const SystemSpec& spec, EffectiveOptions options = {});

}  // namespace mmpol
