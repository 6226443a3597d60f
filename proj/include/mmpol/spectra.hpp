// spectra.hpp: eigenpairs of dynamical matrices and their physical reading.
#pragma once

#include "mmpol/model.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmpol {

struct ComplexEigenpair {
    cplx lambda;              // frame-relative complex frequency, eV
    Eigen::VectorXcd vector;  // unit norm, largest component real-positive
};

// All eigenpairs, sorted by Re lambda then Im lambda. Throws SolverError on non-convergence.
std::vector<ComplexEigenpair> eig_dense(const DynamicalMatrix& matrix);

struct ArrowheadSpectrum {
    std::vector<ComplexEigenpair> pairs;  // sorted as eig_dense
    bool dense_fallback = false;          // degenerate coupled arrow points were present
};

// Roots of the secular function with analytic eigenvectors. Requires arrowhead form
// (last basis entry is the corner).
ArrowheadSpectrum eig_arrowhead(const DynamicalMatrix& matrix);

// Phi(lambda) = p - lambda - sum_q e_q^2 / (d_q - lambda). Throws PoleError at lambda = d_q.
cplx secular_function(const DynamicalMatrix& arrowhead, cplx lambda);

// Roots of the monic polynomial z^n + c[n-1] z^{n-1} + ... + c[0], via the companion matrix.
std::vector<cplx> companion_roots(const std::vector<cplx>& monic_coefficients);

// Sign s in Gamma = kappa_0 + s * 2 Im(lambda).
enum class BandwidthConvention {
    calibrated,  // s = -1: a decoupled mode reports its bare width
    flipped,     // s = +1, kept for comparison and mutation testing
};

double physical_bandwidth(double kappa0, cplx lambda, BandwidthConvention convention = BandwidthConvention::calibrated);

struct BranchLabel {
    enum class Kind { unlabeled, lower_polariton, upper_polariton, dark, photonic };
    Kind kind = Kind::unlabeled;
    int mode = 0;  // q for photonic branches

    std::string to_string() const;
    friend bool operator==(const BranchLabel&, const BranchLabel&) = default;
};

struct PolaritonBranch {
    cplx lambda;
    double energy = 0.0;     // eV, lab frame
    double bandwidth = 0.0;  // eV, full width
    Eigen::VectorXcd amplitudes;
    std::vector<BasisLabel> basis;
    BranchLabel label;

    // |beta|^2: weight on the collective state (or on all emitters for full builds).
    double exciton_fraction() const;
    // |alpha_q|^2, zero if q is not in the basis.
    double photon_fraction(int q) const;
    // q -> |alpha_q|^2 for every mode in the basis.
    std::map<int, double> photon_fractions() const;
};

std::vector<PolaritonBranch> to_physical(const std::vector<ComplexEigenpair>& pairs, const DynamicalMatrix& matrix,
                                         BandwidthConvention convention = BandwidthConvention::calibrated);

// LP/UP: largest |beta|^2 strictly below/above omega_e, provided it exceeds 0.01.
// Everything else becomes photonic(q) by dominant |alpha_q|^2, or dark when the
// exciton weight dominates.
void classify_branches(std::vector<PolaritonBranch>& branches, const SystemSpec& spec);

// Greedy nearest-neighbour assignment in the complex plane: result[i] is the index in
// `next` matched to previous[i].
std::vector<std::size_t> match_eigenvalues(const std::vector<cplx>& previous, const std::vector<cplx>& next);

// Relabel `next` so that each branch inherits the label of its nearest predecessor.
void track_labels(const std::vector<PolaritonBranch>& previous, std::vector<PolaritonBranch>& next);

// Smallest total |a_i - b_pi(i)| deviation after matching, reported as the largest single gap.
double max_matched_gap(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Decoupled-mode calibration: true when the convention returns kappa_q for an isolated mode.
bool bandwidth_convention_self_test(BandwidthConvention convention = BandwidthConvention::calibrated);

// Dicke spectrum, physical branches, labelled. Convenience for the higher layers.
std::vector<PolaritonBranch> solve_dicke(const SystemSpec& spec);

}  // namespace mmpol
