#include "mmpol/model.hpp"

#include "mmpol/adiabatic.hpp"
#include "mmpol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace mmpol {

// ------------------------------- CavityModeSet -------------------------------

CavityModeSet::CavityModeSet(std::vector<CavityMode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw ConfigurationError("CavityModeSet: at least one mode is required");
    std::sort(modes_.begin(), modes_.end(), [](const CavityMode& a, const CavityMode& b) { return a.q < b.q; });
    std::set<int> seen;
    for (const auto& m : modes_) {
        if (!seen.insert(m.q).second)
            throw ConfigurationError("CavityModeSet: duplicate mode index q=" + std::to_string(m.q));
        if (!(m.omega > 0.0) || !std::isfinite(m.omega))
            throw ConfigurationError("CavityModeSet: mode q=" + std::to_string(m.q) + " needs omega > 0");
        if (!(m.kappa >= 0.0) || !std::isfinite(m.kappa))
            throw ConfigurationError("CavityModeSet: mode q=" + std::to_string(m.q) + " needs kappa >= 0");
    }
    if (!seen.count(0)) throw ConfigurationError("CavityModeSet: no reference mode with q=0");
    ref_ = position(0);
}

CavityModeSet CavityModeSet::three_mode(double omega0, double kappa0, double fsr, double zeta) {
    return CavityModeSet({{-1, omega0 - fsr, kappa0 - zeta}, {0, omega0, kappa0}, {1, omega0 + fsr, kappa0 + zeta}});
}

CavityModeSet CavityModeSet::ideal_planar(double length_nm, double n_d, int m_ref, int m_first, int m_last,
                                          double kappa0, double zeta) {
    if (!(length_nm > 0.0) || !(n_d > 0.0)) throw ConfigurationError("ideal_planar: L and n_d must be positive");
    if (m_first < 1 || m_last < m_first || m_ref < m_first || m_ref > m_last)
        throw ConfigurationError("ideal_planar: need 1 <= m_first <= m_ref <= m_last");
    std::vector<CavityMode> modes;
    for (int m = m_first; m <= m_last; ++m) {
        const double q_perp = m * std::numbers::pi / (2.0 * length_nm);  // 1/nm
        const int q = m - m_ref;
        modes.push_back({q, kHbarC * q_perp / n_d, kappa0 + q * zeta});
    }
    return CavityModeSet(std::move(modes));
}

bool CavityModeSet::contains(int q) const noexcept {
    return std::any_of(modes_.begin(), modes_.end(), [q](const CavityMode& m) { return m.q == q; });
}

std::size_t CavityModeSet::position(int q) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), q,
                               [](const CavityMode& m, int value) { return m.q < value; });
    if (it == modes_.end() || it->q != q) throw ConfigurationError("CavityModeSet: no mode q=" + std::to_string(q));
    return static_cast<std::size_t>(it - modes_.begin());
}

std::optional<double> CavityModeSet::fsr() const {
    if (!contains(1)) return std::nullopt;
    return mode(1).omega - reference().omega;
}

std::optional<double> CavityModeSet::finesse() const {
    auto d = fsr();
    if (!d || reference().kappa <= 0.0) return std::nullopt;
    return *d / reference().kappa;
}

// ------------------------------ EmitterEnsemble ------------------------------

EmitterEnsemble EmitterEnsemble::homogeneous(int count, double omega, double gamma) {
    if (count < 1) throw ConfigurationError("EmitterEnsemble: N must be >= 1");
    if (!(omega > 0.0)) throw ConfigurationError("EmitterEnsemble: omega_e must be positive");
    if (!(gamma >= 0.0)) throw ConfigurationError("EmitterEnsemble: gamma must be >= 0");
    return EmitterEnsemble(Homogeneous{count, omega, gamma});
}

EmitterEnsemble EmitterEnsemble::distinct(std::vector<double> omega, std::vector<double> gamma) {
    if (omega.empty()) throw ConfigurationError("EmitterEnsemble: N must be >= 1");
    if (omega.size() != gamma.size())
        throw ConfigurationError("EmitterEnsemble: frequency and decay lists differ in length");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!(omega[i] > 0.0)) throw ConfigurationError("EmitterEnsemble: emitter frequencies must be positive");
        if (!(gamma[i] >= 0.0)) throw ConfigurationError("EmitterEnsemble: emitter decays must be >= 0");
    }
    return EmitterEnsemble(Distinct{std::move(omega), std::move(gamma)});
}

int EmitterEnsemble::count() const noexcept {
    if (const auto* h = std::get_if<Homogeneous>(&rep_)) return h->count;
    return static_cast<int>(std::get<Distinct>(rep_).omega.size());
}

double EmitterEnsemble::omega(int i) const {
    if (i < 0 || i >= count()) throw std::out_of_range("EmitterEnsemble: emitter index out of range");
    if (const auto* h = std::get_if<Homogeneous>(&rep_)) return h->omega;
    return std::get<Distinct>(rep_).omega[static_cast<std::size_t>(i)];
}

double EmitterEnsemble::gamma(int i) const {
    if (i < 0 || i >= count()) throw std::out_of_range("EmitterEnsemble: emitter index out of range");
    if (const auto* h = std::get_if<Homogeneous>(&rep_)) return h->gamma;
    return std::get<Distinct>(rep_).gamma[static_cast<std::size_t>(i)];
}

// -------------------------------- CouplingMap --------------------------------

CouplingMap CouplingMap::collective(std::map<int, double> rabi) {
    for (const auto& [q, value] : rabi) {
        if (!(value >= 0.0) || !std::isfinite(value))
            throw ConfigurationError("CouplingMap: collective coupling for q=" + std::to_string(q) +
                                     " must be a finite non-negative real");
    }
    return CouplingMap(std::move(rabi));
}

CouplingMap CouplingMap::parametric(double rabi0, double f, const CavityModeSet& modes) {
    if (!(std::abs(f) < 1.0)) throw DomainError("CouplingMap::parametric: requires |f| < 1");
    std::map<int, double> rabi;
    for (const auto& m : modes.modes()) {
        if (m.q < -1 || m.q > 1)
            throw ConfigurationError("CouplingMap::parametric: only modes q in {-1, 0, +1} are parametrised");
        rabi[m.q] = rabi0 * (1.0 + m.q * f);
    }
    return collective(std::move(rabi));
}

CouplingMap CouplingMap::per_pair(Eigen::MatrixXcd g) {
    if (g.size() == 0) throw ConfigurationError("CouplingMap: empty per-pair coupling matrix");
    if (!g.allFinite()) throw ConfigurationError("CouplingMap: non-finite per-pair coupling");
    return CouplingMap(std::move(g));
}

const std::map<int, double>& CouplingMap::collective_rabi() const {
    if (!is_collective()) throw UnsupportedReduction("CouplingMap: couplings are per-pair, not collective");
    return std::get<std::map<int, double>>(rep_);
}

const Eigen::MatrixXcd& CouplingMap::per_pair_matrix() const {
    if (is_collective()) throw UnsupportedReduction("CouplingMap: couplings are collective, not per-pair");
    return std::get<Eigen::MatrixXcd>(rep_);
}

// -------------------------------- SystemSpec ---------------------------------

SystemSpec::SystemSpec(CavityModeSet modes, EmitterEnsemble emitters, CouplingMap couplings)
    : modes_(std::move(modes)), emitters_(std::move(emitters)), couplings_(std::move(couplings)) {
    if (couplings_.is_collective()) {
        const auto& rabi = couplings_.collective_rabi();
        if (rabi.size() != modes_.size())
            throw ConfigurationError("SystemSpec: collective coupling map has " + std::to_string(rabi.size()) +
                                     " entries for " + std::to_string(modes_.size()) + " modes");
        for (const auto& m : modes_.modes()) {
            if (!rabi.count(m.q))
                throw ConfigurationError("SystemSpec: no collective coupling for mode q=" + std::to_string(m.q));
        }
    } else {
        const auto& g = couplings_.per_pair_matrix();
        if (g.rows() != emitters_.count() || g.cols() != static_cast<Eigen::Index>(modes_.size())) {
            std::ostringstream os;
            os << "SystemSpec: per-pair couplings are " << g.rows() << "x" << g.cols() << ", expected "
               << emitters_.count() << "x" << modes_.size();
            throw ConfigurationError(os.str());
        }
    }
    for (const auto& m : modes_.modes())
        quasi_static_.push_back(m.q == 0 || std::abs(modes_.detuning(m.q)) > mode_coupling_norm(m.q));
}

cplx SystemSpec::coupling(int emitter, int q) const {
    if (emitter < 0 || emitter >= emitters_.count()) throw std::out_of_range("SystemSpec: emitter index");
    if (couplings_.is_collective())
        return {collective_rabi(q) / std::sqrt(static_cast<double>(emitters_.count())), 0.0};
    return couplings_.per_pair_matrix()(emitter, static_cast<Eigen::Index>(modes_.position(q)));
}

double SystemSpec::collective_rabi(int q) const {
    const auto& rabi = couplings_.collective_rabi();
    auto it = rabi.find(q);
    if (it == rabi.end()) throw ConfigurationError("SystemSpec: no mode q=" + std::to_string(q));
    return it->second;
}

double SystemSpec::mode_coupling_norm(int q) const {
    if (couplings_.is_collective()) return collective_rabi(q);
    return couplings_.per_pair_matrix().col(static_cast<Eigen::Index>(modes_.position(q))).norm();
}

bool SystemSpec::quasi_static_valid(int q) const { return quasi_static_[modes_.position(q)]; }

// ------------------------------ DynamicalMatrix ------------------------------

std::string BasisLabel::to_string() const {
    switch (kind) {
        case Kind::mode: return "mode q=" + std::to_string(index);
        case Kind::emitter: return "emitter i=" + std::to_string(index);
        case Kind::collective: return "X";
    }
    return "?";
}

Eigen::Index DynamicalMatrix::find(const BasisLabel& label) const noexcept {
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k] == label) return static_cast<Eigen::Index>(k);
    }
    return -1;
}

namespace {

Frame reference_frame(const SystemSpec& spec) {
    return {spec.modes().reference().omega, spec.modes().reference().kappa};
}

cplx mode_diagonal(const CavityModeSet& modes, int q) {
    return {modes.detuning(q), -0.5 * modes.kappa_mismatch(q)};
}

}  // namespace

DynamicalMatrix build_full_matrix(const SystemSpec& spec) {
    const auto& modes = spec.modes();
    const int n_modes = static_cast<int>(modes.size());
    const int n_emit = spec.emitters().count();

    DynamicalMatrix out;
    out.frame = reference_frame(spec);
    out.form = MatrixForm::full;
    out.entries = Eigen::MatrixXcd::Zero(n_modes + n_emit, n_modes + n_emit);

    for (int a = 0; a < n_modes; ++a) {
        const int q = modes.modes()[static_cast<std::size_t>(a)].q;
        out.basis.push_back({BasisLabel::Kind::mode, q});
        out.entries(a, a) = mode_diagonal(modes, q);
    }
    for (int j = 0; j < n_emit; ++j) {
        const int row = n_modes + j;
        out.basis.push_back({BasisLabel::Kind::emitter, j});
        out.entries(row, row) = cplx(-spec.emitter_detuning(j), 0.5 * spec.emitter_decay_mismatch(j));
        for (int a = 0; a < n_modes; ++a) {
            const cplx g = spec.coupling(j, modes.modes()[static_cast<std::size_t>(a)].q);
            out.entries(row, a) = g;             // dc_j/dt  ~ -i g_jq c_q
            out.entries(a, row) = std::conj(g);  // dc_q/dt  ~ -i g*_jq c_j
        }
    }
    return out;
}

DynamicalMatrix build_dicke_matrix(const SystemSpec& spec) {
    if (!spec.emitters().is_homogeneous())
        throw UnsupportedReduction("build_dicke_matrix: emitters are not homogeneous");
    if (!spec.couplings().is_collective())
        throw UnsupportedReduction("build_dicke_matrix: couplings are not collective");

    const auto& modes = spec.modes();
    const int n_modes = static_cast<int>(modes.size());

    DynamicalMatrix out;
    out.frame = reference_frame(spec);
    out.form = MatrixForm::arrowhead;
    out.entries = Eigen::MatrixXcd::Zero(n_modes + 1, n_modes + 1);
    for (int a = 0; a < n_modes; ++a) {
        const int q = modes.modes()[static_cast<std::size_t>(a)].q;
        out.basis.push_back({BasisLabel::Kind::mode, q});
        out.entries(a, a) = mode_diagonal(modes, q);
        out.entries(a, n_modes) = spec.collective_rabi(q);
        out.entries(n_modes, a) = spec.collective_rabi(q);
    }
    out.basis.push_back({BasisLabel::Kind::collective, 0});
    out.entries(n_modes, n_modes) = cplx(-spec.emitter_detuning(0), 0.5 * spec.emitter_decay_mismatch(0));
    return out;
}

DynamicalMatrix build_effective_two_level(const SystemSpec& spec, const AdiabaticCorrections& corrections) {
    const double rabi0 = spec.mode_coupling_norm(0);
    DynamicalMatrix out;
    out.frame = reference_frame(spec);
    out.form = MatrixForm::two_level;
    out.basis = {{BasisLabel::Kind::mode, 0}, {BasisLabel::Kind::collective, 0}};
    out.entries = Eigen::MatrixXcd::Zero(2, 2);
    out.entries(0, 1) = rabi0;
    out.entries(1, 0) = rabi0;
    out.entries(1, 1) = cplx(-corrections.delta_N, -corrections.delta_Gamma_N);
    return out;
}

}  // namespace mmpol
