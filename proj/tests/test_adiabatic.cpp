#include "doctest.h"

#include "mmpol/adiabatic.hpp"
#include "mmpol/errors.hpp"
#include "mmpol/spectra.hpp"
#include "mmpol/sweep.hpp"

using namespace mmpol;

namespace {

SystemSpec two_mode(double rabi_side, double zeta) {
    return SystemSpec(CavityModeSet({{0, 2.0, 0.1}, {1, 3.0, 0.1 + zeta}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                      CouplingMap::collective({{0, 0.35}, {1, rabi_side}}));
}

}  // namespace

TEST_CASE("one-body shift from a single higher mode") {
    CHECK(one_body_shift(two_mode(0.1, 0.0), 0) == doctest::Approx(-0.01));
}

TEST_CASE("symmetric pair cancels the one-body shift") {
    const SystemSpec spec(CavityModeSet::three_mode(2.0, 0.1, 1.0, 0.0), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{-1, 0.2}, {0, 0.35}, {1, 0.2}}));
    CHECK(std::abs(one_body_shift(spec, 0)) < 1e-17);
}

TEST_CASE("pair coupling is half the one-body shift for i = j") {
    const auto spec = two_mode(0.1, 0.05);
    CHECK(two_body_coupling(spec, 0, 0).real() == doctest::Approx(one_body_shift(spec, 0) / 2));
}

TEST_CASE("complex couplings carry their phase into J''") {
    const double phi = 0.7;
    Eigen::MatrixXcd g(2, 2);
    g << cplx(0.1, 0.0), std::polar(0.1, phi), cplx(0.1, 0.0), cplx(0.1, 0.0);
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}, {1, 3.0, 0.1}}), EmitterEnsemble::homogeneous(2, 2.0, 0.1),
                          CouplingMap::per_pair(g));
    const double arg = std::arg(two_body_coupling(spec, 0, 1));
    CHECK(std::abs(std::remainder(arg + phi, M_PI)) < 1e-12);
}

TEST_CASE("no mismatch means no decay corrections") {
    const auto spec = two_mode(0.3, 0.0);
    CHECK(one_body_decay(spec, 0) == 0.0);
    CHECK(std::abs(two_body_loss(spec, 0, 0)) == 0.0);
}

TEST_CASE("two-mode collective loss matches the numpy reference") {
    const auto c = effective_parameters(two_mode(0.35, 0.1));
    CHECK(c.collective_loss == doctest::Approx(-0.006109725685785536).epsilon(1e-12));
}

TEST_CASE("symmetric three-mode loss cancels at f = 0") {
    auto s = preset_setup("fig2b");
    apply_parameter(s, "delta_kappa", 0.1);
    CHECK(std::abs(effective_parameters(s.to_spec()).collective_loss) < 1e-17);
}

TEST_CASE("Fig. 2b point: effective parameters and splitting") {
    auto s = preset_setup("fig2b");
    apply_parameter(s, "delta_Omega", 0.05);
    apply_parameter(s, "delta_kappa", 0.1);
    const auto spec = s.to_spec();
    const auto c = effective_parameters(spec);
    CHECK(c.collective_shift == doctest::Approx(-0.034912718204488775).epsilon(1e-12));
    CHECK(c.collective_loss == doctest::Approx(-0.003491271820448877).epsilon(1e-12));
    CHECK(c.delta_N == doctest::Approx(0.034912718204488775).epsilon(1e-12));
    CHECK(c.delta_Gamma_N == doctest::Approx(-0.003491271820448877).epsilon(1e-12));
    CHECK(rabi_splitting_adiabatic(spec) == doctest::Approx(0.7008614265028916).epsilon(1e-12));
    const auto pairs = eig_dense(build_effective_two_level(spec, c));
    CHECK(std::abs(pairs[1].lambda.real() - pairs[0].lambda.real() - rabi_splitting_adiabatic(spec)) < 1e-12);
}

TEST_CASE("thermodynamic limit flag toggles the one-body terms") {
    auto s = preset_setup("fig2a");
    apply_parameter(s, "delta_kappa", 0.08);
    s.N = 3;
    const auto spec = s.to_spec();
    const auto on = effective_parameters(spec, {true});
    const auto off = effective_parameters(spec, {false});
    CHECK(off.delta_N == doctest::Approx(on.delta_N - on.one_body_shift));
    CHECK(off.delta_Gamma_N == doctest::Approx(on.delta_Gamma_N + on.one_body_decay));
}

TEST_CASE("infinite finesse leaves the bare parameters") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.1, 0.3),
                          CouplingMap::collective({{0, 0.35}}));
    const auto c = effective_parameters(spec);
    CHECK(c.delta_N == doctest::Approx(spec.emitter_detuning(0)));
    CHECK(c.delta_Gamma_N == doctest::Approx(-spec.emitter_decay_mismatch(0) / 2));
}

TEST_CASE("closed-form splitting limits") {
    CHECK(rabi_splitting_adiabatic(0.0, 0.0, 0.0, 0.0, 0.35) == doctest::Approx(0.7));
    CHECK(rabi_splitting_adiabatic(0.0, 0.7, 0.0, 0.0, 0.35) == doctest::Approx(0.0));
}

TEST_CASE("homogeneous two-body rate: exact vs printed closed form") {
    const auto r = nj_prime_homogeneous(0.35, 0.05, 1.0, 0.1);
    CHECK(r.exact == doctest::Approx(-0.0012219451371571076).epsilon(1e-12));
    CHECK(r.approximate == doctest::Approx(0.0006109725685785537).epsilon(1e-12));
    CHECK(nj_prime_homogeneous(0.35, 0.0, 1.0, 0.1).exact == 0.0);
    const auto z = nj_prime_homogeneous(0.35, 0.05, 1.0, 0.0);
    CHECK(z.exact == 0.0);
    CHECK(z.approximate == 0.0);
    CHECK_THROWS_AS(nj_prime_homogeneous(0.35, 0.05, 0.0, 0.0), DomainError);
}

TEST_CASE("mode at zero offset with zero mismatch is singular") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}, {1, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{0, 0.35}, {1, 0.1}}));
    CHECK_THROWS_AS(effective_parameters(spec), SingularModeError);
}
