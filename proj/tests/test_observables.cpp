#include "doctest.h"

#include "mmpol/errors.hpp"
#include "mmpol/observables.hpp"
#include "mmpol/sweep.hpp"

using namespace mmpol;

TEST_CASE("single-mode resonant polaritons are half light, half matter") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{0, 0.35}}));
    const auto s = summarize(solve_dicke(spec), spec);
    REQUIRE(s.has_LP());
    CHECK(*s.E_LP == doctest::Approx(1.65));
    CHECK(*s.E_UP == doctest::Approx(2.35));
    CHECK(*s.exciton_fraction_LP == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*s.Gamma_LP == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s.omega_R_single_mode == doctest::Approx(0.7));
}

TEST_CASE("Fig. 4 LP at Omega_0 = 0.35 is mostly light") {
    auto setup = preset_setup("fig4");
    setup.Omega0 = 0.35;
    const auto spec = setup.to_spec();
    const auto s = summarize(solve_dicke(spec), spec);
    REQUIRE(s.has_LP());
    CHECK(*s.exciton_fraction_LP < 0.5);
    const auto single = reference_mode_only(spec);
    const auto ref = summarize(solve_dicke(single), single);
    CHECK(s.photon_fractions_LP.at(0) < ref.photon_fractions_LP.at(0));
}

TEST_CASE("mode shift scan") {
    const auto spec = preset_setup("fig4").to_spec();
    const auto same = mode_shift_scan(spec, 0.0);
    CHECK(same.modes().mode(-1).omega == spec.modes().mode(-1).omega);
    const auto shifted = mode_shift_scan(spec, 0.3);
    CHECK(shifted.modes().mode(-1).omega == doctest::Approx(1.75));
    CHECK(shifted.modes().mode(1).omega == doctest::Approx(2.46));
    CHECK_THROWS_AS(mode_shift_scan(spec, 0.7), DomainError);
}
