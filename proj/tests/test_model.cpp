#include "doctest.h"

#include "mmpol/errors.hpp"
#include "mmpol/model.hpp"
#include "mmpol/spectra.hpp"

using namespace mmpol;

namespace {

SystemSpec three_mode_spec(int n = 1) {
    return SystemSpec(CavityModeSet::three_mode(2.0, 0.1, 1.0, 0.05), EmitterEnsemble::homogeneous(n, 2.1, 0.2),
                      CouplingMap::collective({{-1, 0.2}, {0, 0.35}, {1, 0.3}}));
}

}  // namespace

TEST_CASE("mode set sorts by q and rejects bad input") {
    const CavityModeSet set({{1, 3.0, 0.1}, {-1, 1.0, 0.1}, {0, 2.0, 0.1}});
    CHECK(set.modes().front().q == -1);
    CHECK(set.position(1) == 2);
    CHECK(set.detuning(-1) == doctest::Approx(-1.0));
    CHECK(set.fsr().value() == doctest::Approx(1.0));
    CHECK(set.finesse().value() == doctest::Approx(10.0));
    CHECK_THROWS_AS(CavityModeSet({{1, 3.0, 0.1}}), ConfigurationError);
    CHECK_THROWS_AS(CavityModeSet({{0, 2.0, 0.1}, {0, 2.5, 0.1}}), ConfigurationError);
    CHECK_THROWS_AS(CavityModeSet({{0, 2.0, -0.1}}), ConfigurationError);
}

TEST_CASE("planar cavity modes follow the standing-wave dispersion") {
    const auto set = CavityModeSet::ideal_planar(500.0, 1.5, 3, 2, 4, 0.1);
    CHECK(set.size() == 3);
    CHECK(set.mode(1).omega - set.mode(0).omega == doctest::Approx(set.mode(0).omega - set.mode(-1).omega));
}

TEST_CASE("parametric couplings need |f| < 1") {
    const auto modes = CavityModeSet::three_mode(2.0, 0.1, 1.0, 0.0);
    const auto c = CouplingMap::parametric(0.35, 0.2, modes);
    CHECK(c.collective_rabi().at(-1) == doctest::Approx(0.28));
    CHECK(c.collective_rabi().at(1) == doctest::Approx(0.42));
    CHECK_THROWS_AS(CouplingMap::parametric(0.35, 1.0, modes), DomainError);
}

TEST_CASE("fully decoupled resonant system gives the zero matrix") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(2, 2.0, 0.1),
                          CouplingMap::collective({{0, 0.0}}));
    CHECK(build_full_matrix(spec).entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-mode resonant Dicke matrix is off-diagonal") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{0, 0.35}}));
    const auto m = build_dicke_matrix(spec);
    CHECK(m.dim() == 2);
    CHECK(std::abs(m.entries(0, 0)) == 0.0);
    CHECK(std::abs(m.entries(1, 1)) == 0.0);
    CHECK(m.entries(0, 1).real() == doctest::Approx(0.35));
    CHECK(m.entries(1, 0).real() == doctest::Approx(0.35));
}

TEST_CASE("Dicke matrix entries") {
    const auto spec = three_mode_spec();
    const auto m = build_dicke_matrix(spec);
    REQUIRE(m.dim() == 4);
    CHECK(m.basis.back().to_string() == "X");
    const auto up = m.find({BasisLabel::Kind::mode, 1});
    CHECK(m.entries(up, up).real() == doctest::Approx(1.0));
    CHECK(m.entries(up, up).imag() == doctest::Approx(-0.025));
    CHECK(m.entries(3, 3).real() == doctest::Approx(0.1));
    CHECK(m.entries(3, 3).imag() == doctest::Approx(-0.05));
    CHECK(m.entries(up, 3).real() == doctest::Approx(0.3));
}

TEST_CASE("collective couplings split as Omega / sqrt(N)") {
    const auto spec = three_mode_spec(4);
    CHECK(spec.coupling(2, 0).real() == doctest::Approx(0.175));
    const auto full = build_full_matrix(spec);
    CHECK(full.dim() == 7);
}

TEST_CASE("full build of N = 3 contains the Dicke spectrum plus a double dark state") {
    const auto spec = three_mode_spec(3);
    const auto dicke = build_dicke_matrix(spec);
    std::vector<cplx> expected;
    for (const auto& p : eig_dense(dicke)) expected.push_back(p.lambda);
    expected.push_back(dicke.entries(3, 3));
    expected.push_back(dicke.entries(3, 3));
    std::vector<cplx> full;
    for (const auto& p : eig_dense(build_full_matrix(spec))) full.push_back(p.lambda);
    CHECK(max_matched_gap(full, expected) < 1e-12);
}

TEST_CASE("Dicke reduction refuses inhomogeneous ensembles") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::distinct({2.0, 2.1}, {0.1, 0.1}),
                          CouplingMap::collective({{0, 0.2}}));
    CHECK_THROWS_AS(build_dicke_matrix(spec), UnsupportedReduction);
    CHECK(build_full_matrix(spec).dim() == 3);
}

TEST_CASE("system validation") {
    CHECK_THROWS_AS(SystemSpec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                               CouplingMap::collective({{0, 0.2}, {1, 0.1}})),
                    ConfigurationError);
    CHECK_THROWS_AS(EmitterEnsemble::homogeneous(0, 2.0, 0.1), ConfigurationError);
    const auto spec = three_mode_spec();
    CHECK(spec.quasi_static_valid(1));
}
