#include "mmpol/observables.hpp"

#include "mmpol/errors.hpp"

namespace mmpol {

SpectrumSummary summarize(const std::vector<PolaritonBranch>& branches, const SystemSpec& spec) {
    SpectrumSummary s;
    s.omega_R_single_mode = 2.0 * spec.mode_coupling_norm(0);
    double gamma = 0.0;
    for (int i = 0; i < spec.emitters().count(); ++i) gamma += spec.emitters().gamma(i);
    gamma /= spec.emitters().count();
    s.Gamma_single_mode = 0.5 * (spec.modes().reference().kappa + gamma);

    for (const auto& b : branches) {
        if (b.label.kind == BranchLabel::Kind::lower_polariton) {
            s.E_LP = b.energy;
            s.Gamma_LP = b.bandwidth;
            s.exciton_fraction_LP = b.exciton_fraction();
            s.photon_fractions_LP = b.photon_fractions();
        } else if (b.label.kind == BranchLabel::Kind::upper_polariton) {
            s.E_UP = b.energy;
            s.Gamma_UP = b.bandwidth;
            s.exciton_fraction_UP = b.exciton_fraction();
            s.photon_fractions_UP = b.photon_fractions();
        }
    }
    if (s.E_LP && s.E_UP) s.omega_R = *s.E_UP - *s.E_LP;
    return s;
}

SystemSpec mode_shift_scan(const SystemSpec& spec, double epsilon) {
    const auto& modes = spec.modes();
    if (!modes.contains(-1) || !modes.contains(1))
        throw UnsupportedReduction("mode_shift_scan: needs modes q = -1 and q = +1");
    std::vector<CavityMode> shifted = modes.modes();
    const double w0 = modes.reference().omega;
    for (auto& m : shifted) {
        if (m.q == -1) m.omega += epsilon;
        if (m.q == 1) m.omega -= epsilon;
    }
    if (shifted[modes.position(-1)].omega >= w0 || shifted[modes.position(1)].omega <= w0)
        throw DomainError("mode_shift_scan: shift moves a side mode onto or across the reference mode");
    return SystemSpec(CavityModeSet(std::move(shifted)), spec.emitters(), spec.couplings());
}

SystemSpec reference_mode_only(const SystemSpec& spec) {
    CavityModeSet modes({spec.modes().reference()});
    if (spec.couplings().is_collective())
        return SystemSpec(modes, spec.emitters(), CouplingMap::collective({{0, spec.collective_rabi(0)}}));
    const auto col = static_cast<Eigen::Index>(spec.modes().position(0));
    return SystemSpec(modes, spec.emitters(), CouplingMap::per_pair(spec.couplings().per_pair_matrix().col(col)));
}

}  // namespace mmpol
