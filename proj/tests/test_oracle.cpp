#include "doctest.h"

#include "mmpol/errors.hpp"
#include "mmpol/oracle.hpp"
#include "mmpol/spectra.hpp"
#include "mmpol/sweep.hpp"

#include <cmath>

using namespace mmpol;

TEST_CASE("undamped resonant Rabi oscillation") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.0}}), EmitterEnsemble::homogeneous(1, 2.0, 0.0),
                          CouplingMap::collective({{0, 0.35}}));
    Eigen::VectorXcd x0(2);
    x0 << 0.0, 1.0;
    const auto tr = propagate(spec, x0, 20.0, 0.01);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double c = std::cos(0.35 * tr.times[k]);
        worst = std::max(worst, std::abs(std::norm(tr.amplitudes(static_cast<Eigen::Index>(k), 1)) - c * c));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("decoupled mode decays at its bare rate") {
    const SystemSpec spec(CavityModeSet::three_mode(2.0, 0.1, 0.8, 0.06), EmitterEnsemble::homogeneous(1, 2.0, 0.15),
                          CouplingMap::collective({{-1, 0.3}, {0, 0.35}, {1, 0.0}}));
    Eigen::VectorXcd x0 = Eigen::VectorXcd::Zero(4);
    x0(2) = 1.0;
    const auto tr = propagate(spec, x0, 100.0, 0.02);
    const auto k = static_cast<Eigen::Index>(tr.times.size() - 1);
    CHECK(std::norm(tr.amplitudes(k, 2)) == doctest::Approx(std::exp(-0.16 * tr.times.back())).epsilon(1e-8));
    const auto fit = fit_complex_frequencies(tr, 1);
    CHECK(physical_bandwidth(0.1, fit.lambdas.front()) == doctest::Approx(0.16).epsilon(1e-7));
}

TEST_CASE("frequency fit recovers the Fig. 4 spectrum at Omega_0 = 0.2") {
    auto setup = preset_setup("fig4");
    setup.Omega0 = 0.2;
    const auto spec = setup.to_spec();
    const auto h = default_horizon(spec);
    const Eigen::VectorXcd x0 = Eigen::VectorXcd::Constant(4, 0.5);
    const auto fit = fit_complex_frequencies(propagate(spec, x0, h.t_final, h.dt), 4);
    std::vector<cplx> exact;
    for (const auto& p : eig_dense(build_dicke_matrix(spec))) exact.push_back(p.lambda);
    CHECK(max_matched_gap(fit.lambdas, exact) < 1e-4);
    CHECK_FALSE(fit.low_confidence);
}

TEST_CASE("propagation rejects unstable steps") {
    const auto spec = preset_setup("fig4").to_spec();
    CHECK_THROWS_AS(propagate(spec, Eigen::VectorXcd::Ones(4), 10.0, 5.0), StepSizeError);
}

TEST_CASE("quasi-static check") {
    auto setup = [](double ratio) {
        ThreeModeSetup s;
        s.omega_e = s.omega0 = 5.0;
        s.Omega0 = 0.1;
        apply_parameter(s, "Delta", 0.1 * ratio);
        apply_parameter(s, "zeta", 0.05);
        return s.to_spec();
    };
    const auto far = verify_adiabatic(setup(20.0));
    const auto near = verify_adiabatic(setup(3.0));
    CHECK(far.in_regime);
    CHECK(far.deviation_reduced < 4.0 * 0.05 * 0.05);
    CHECK(near.deviation_reduced > 10.0 * far.deviation_reduced);
    const SystemSpec single(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(2, 2.0, 0.2),
                            CouplingMap::collective({{0, 0.3}}));
    CHECK(verify_adiabatic(single).deviation_reduced < 1e-12);
}
