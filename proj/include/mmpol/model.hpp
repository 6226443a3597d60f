// model.hpp: physical system description and the single-excitation dynamical matrices.
//
// All matrices are expressed in the frame rotating at the complex frequency of the
// reference (q = 0) cavity mode, w0 - i k0/2, so that the amplitude vector obeys
// dx/dt = -i M x. Energies are in eV, time in 1/eV (hbar = 1).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mmpol {

using cplx = std::complex<double>;

// hbar * c in eV nm.
inline constexpr double kHbarC = 197.3269804;

struct CavityMode {
    int q = 0;
    double omega = 0.0;  // eV
    double kappa = 0.0;  // eV, full width
};

class CavityModeSet {
public:
    // Modes are sorted by q. Requires unique indices, exactly one q = 0 entry,
    // omega > 0 and kappa >= 0 everywhere.
    explicit CavityModeSet(std::vector<CavityMode> modes);

    // Three modes q = -1, 0, +1 at w0 -/+ fsr with kappa_q = kappa0 + q * zeta.
    static CavityModeSet three_mode(double omega0, double kappa0, double fsr, double zeta);

    // Ideal planar resonator: q_perp(m) = m pi / (2 L), omega_m = hbar c q_perp / n_d.
    // Mode m_ref becomes q = 0; bandwidths follow kappa0 + q * zeta.
    static CavityModeSet ideal_planar(double length_nm, double n_d, int m_ref, int m_first, int m_last,
                                      double kappa0, double zeta = 0.0);

    std::size_t size() const noexcept { return modes_.size(); }
    const std::vector<CavityMode>& modes() const noexcept { return modes_; }
    const CavityMode& reference() const { return modes_[ref_]; }
    bool contains(int q) const noexcept;
    std::size_t position(int q) const;  // index in ascending-q order
    const CavityMode& mode(int q) const { return modes_[position(q)]; }

    double detuning(int q) const { return mode(q).omega - reference().omega; }       // Delta_q
    double kappa_mismatch(int q) const { return mode(q).kappa - reference().kappa; }  // Delta kappa_q

    // Free spectral range w_{+1} - w_0, when a q = +1 mode exists.
    std::optional<double> fsr() const;
    // fsr / kappa_0.
    std::optional<double> finesse() const;

private:
    std::vector<CavityMode> modes_;
    std::size_t ref_ = 0;
};

class EmitterEnsemble {
public:
    static EmitterEnsemble homogeneous(int count, double omega, double gamma);
    static EmitterEnsemble distinct(std::vector<double> omega, std::vector<double> gamma);

    int count() const noexcept;
    bool is_homogeneous() const noexcept { return std::holds_alternative<Homogeneous>(rep_); }
    double omega(int i) const;
    double gamma(int i) const;

private:
    struct Homogeneous {
        int count;
        double omega;
        double gamma;
    };
    struct Distinct {
        std::vector<double> omega;
        std::vector<double> gamma;
    };
    explicit EmitterEnsemble(std::variant<Homogeneous, Distinct> rep) : rep_(std::move(rep)) {}

    std::variant<Homogeneous, Distinct> rep_;
};

// Light-matter couplings, either collective Omega_q = sqrt(N) g_q (real, >= 0) per mode
// or an explicit complex g_{iq} for every emitter/mode pair.
class CouplingMap {
public:
    static CouplingMap collective(std::map<int, double> rabi);
    // Omega_0 = rabi0, Omega_{+/-1} = rabi0 (1 +/- f) for whichever of q = +/-1 exist in `modes`.
    static CouplingMap parametric(double rabi0, double f, const CavityModeSet& modes);
    // Rows are emitters, columns follow the ascending-q mode order.
    static CouplingMap per_pair(Eigen::MatrixXcd g);

    bool is_collective() const noexcept { return std::holds_alternative<std::map<int, double>>(rep_); }
    const std::map<int, double>& collective_rabi() const;
    const Eigen::MatrixXcd& per_pair_matrix() const;

private:
    explicit CouplingMap(std::variant<std::map<int, double>, Eigen::MatrixXcd> rep) : rep_(std::move(rep)) {}

    std::variant<std::map<int, double>, Eigen::MatrixXcd> rep_;
};

class SystemSpec {
public:
    SystemSpec(CavityModeSet modes, EmitterEnsemble emitters, CouplingMap couplings);

    const CavityModeSet& modes() const noexcept { return modes_; }
    const EmitterEnsemble& emitters() const noexcept { return emitters_; }
    const CouplingMap& couplings() const noexcept { return couplings_; }

    // Homogeneous emitters with collective couplings.
    bool is_dicke() const noexcept { return emitters_.is_homogeneous() && couplings_.is_collective(); }

    // g_{iq}; collective maps give Omega_q / sqrt(N) for every emitter.
    cplx coupling(int emitter, int q) const;
    // Omega_q. Collective maps only.
    double collective_rabi(int q) const;
    // sqrt(sum_j |g_jq|^2).
    double mode_coupling_norm(int q) const;

    double emitter_detuning(int i) const { return modes_.reference().omega - emitters_.omega(i); }  // delta_i
    double emitter_decay_mismatch(int i) const { return modes_.reference().kappa - emitters_.gamma(i); }

    // Quasi-static elimination criterion |Delta_q| > sqrt(sum_j |g_jq|^2); always true for q = 0.
    bool quasi_static_valid(int q) const;

private:
    CavityModeSet modes_;
    EmitterEnsemble emitters_;
    CouplingMap couplings_;
    std::vector<bool> quasi_static_;
};

struct Frame {
    double omega0 = 0.0;
    double kappa0 = 0.0;
    cplx complex_frequency() const noexcept { return {omega0, -0.5 * kappa0}; }
};

struct BasisLabel {
    enum class Kind { mode, emitter, collective };
    Kind kind = Kind::mode;
    int index = 0;  // q for modes, emitter number for emitters, 0 for the collective state

    std::string to_string() const;
    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

enum class MatrixForm { full, arrowhead, two_level };

struct DynamicalMatrix {
    Eigen::MatrixXcd entries;
    Frame frame;
    std::vector<BasisLabel> basis;
    MatrixForm form = MatrixForm::full;

    Eigen::Index dim() const noexcept { return entries.rows(); }
    // Position of a basis label, or -1.
    Eigen::Index find(const BasisLabel& label) const noexcept;
};

struct AdiabaticCorrections;

// (M+N) x (M+N) matrix: modes ascending by q, then emitters ascending by index.
DynamicalMatrix build_full_matrix(const SystemSpec& spec);

// (M+1) x (M+1) arrowhead: mode diagonal d_q = Delta_q - i dk_q/2, arrow e_q = Omega_q,
// corner p = -delta + i dgamma/2. Requires a Dicke spec.
DynamicalMatrix build_dicke_matrix(const SystemSpec& spec);

// 2x2 [[0, Omega_0], [Omega_0, -delta_N - i dGamma_N]] in the (q = 0, X) basis.
DynamicalMatrix build_effective_two_level(const SystemSpec& spec, const AdiabaticCorrections& corrections);

}  // namespace mmpol
