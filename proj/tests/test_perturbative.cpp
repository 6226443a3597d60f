#include "doctest.h"

#include "mmpol/errors.hpp"
#include "mmpol/perturbative.hpp"
#include "mmpol/spectra.hpp"

using namespace mmpol;

namespace {

DynamicalMatrix symmetric(double rabi, double fsr, double zeta, double side = -1.0) {
    const double s = side < 0 ? rabi : side;
    return build_dicke_matrix(SystemSpec(CavityModeSet::three_mode(10.0, 0.1, fsr, zeta),
                                         EmitterEnsemble::homogeneous(1, 10.0, 0.1),
                                         CouplingMap::collective({{-1, s}, {0, rabi}, {1, s}})));
}

}  // namespace

TEST_CASE("Phi vanishes at the single-mode roots when the side modes decouple") {
    const auto m = symmetric(0.35, 1.0, 0.0, 0.0);
    CHECK(std::abs(phi(cplx(0.35), m)) < 1e-15);
    const auto a = ThreeModeArrowhead::from_matrix(m);
    const auto [lo, hi] = single_mode_roots(a);
    CHECK(lo.real() == doctest::Approx(-0.35));
    CHECK(hi.real() == doctest::Approx(0.35));
    CHECK_THROWS_AS(phi(a.d_plus, a), PoleError);
}

TEST_CASE("Phi / (-lambda) tends to one") {
    const auto a = ThreeModeArrowhead::from_matrix(symmetric(0.35, 1.0, -0.1));
    CHECK(std::abs(phi(cplx(1e7), a) / cplx(-1e7) - 1.0) < 1e-6);
}

TEST_CASE("eigenvalues from the arrowhead solver are roots of Phi") {
    const auto m = symmetric(0.35, 1.0, -0.1);
    for (const auto& p : eig_arrowhead(m).pairs) CHECK(std::abs(phi(p.lambda, m)) < 1e-9);
}

TEST_CASE("level pushing for zeta = 0") {
    const double rabi = 0.35, fsr = 1.0;
    const auto r = x_correction(symmetric(rabi, fsr, 0.0));
    const double x = rabi * rabi * rabi / (rabi * rabi + fsr * fsr);
    CHECK(r.x_minus.real() == doctest::Approx(x).epsilon(1e-12));
    CHECK(r.x_plus.real() == doctest::Approx(-x).epsilon(1e-12));
    CHECK(std::abs(r.x_minus.imag()) < 1e-15);
    CHECK(r.Omega_R == doctest::Approx(2 * rabi * fsr * fsr / (fsr * fsr + rabi * rabi)).epsilon(1e-12));
}

TEST_CASE("no side couplings, no correction") {
    const auto r = x_correction(symmetric(0.35, 1.0, -0.1, 0.0));
    CHECK(std::abs(r.x_minus) < 1e-15);
    CHECK(std::abs(r.x_plus) < 1e-15);
}

TEST_CASE("linear-zeta formulas match the numpy reference") {
    CHECK(splitting_linear_zeta(0.35, 1.0, -0.1) == doctest::Approx(0.6242095265279206).epsilon(1e-13));
    const auto g = bandwidths_linear_zeta(0.35, 1.0, -0.1, 0.15);
    CHECK(g.up == doctest::Approx(0.14324806472409093).epsilon(1e-13));
    CHECK(g.lp == doctest::Approx(0.15675193527590905).epsilon(1e-13));
    CHECK(g.lp + g.up == doctest::Approx(0.3).epsilon(1e-15));
    const auto flat = bandwidths_linear_zeta(0.35, 1.0, 0.0, 0.15);
    CHECK(flat.lp == 0.15);
    CHECK(flat.up == 0.15);
    CHECK_THROWS_AS(splitting_linear_zeta(0.35, 0.0, 0.1), DomainError);
}

TEST_CASE("linear-zeta formulas reduce to the single-mode case far away") {
    CHECK(splitting_linear_zeta(0.01, 100.0, 0.01) == doctest::Approx(0.02).epsilon(1e-8));
}

TEST_CASE("linear-zeta splitting tracks the exact solver within the quadratic band") {
    const auto cmp = compare_with_exact(symmetric(0.35, 1.0, -0.1), x_correction(symmetric(0.35, 1.0, -0.1)));
    const double formula = splitting_linear_zeta(0.35, 1.0, -0.1);
    CHECK(std::abs(formula - cmp.Omega_R) / cmp.Omega_R < 0.35 * 0.35);
}

TEST_CASE("printed real parts overshoot the linearised roots by Omega^2 + Delta^2 at zeta = 0") {
    const double a = 0.35 * 0.35 + 1.0;
    const auto printed = printed_corrections(0.35, 1.0, 0.0, 0.0);
    const auto r = x_correction(symmetric(0.35, 1.0, 0.0));
    CHECK(printed.re_x_minus == doctest::Approx(a * r.x_minus.real()).epsilon(1e-12));
    CHECK(printed.re_x_plus == doctest::Approx(a * r.x_plus.real()).epsilon(1e-12));
    CHECK(printed.two_im_x_minus == 0.0);
}
