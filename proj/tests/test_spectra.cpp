#include "doctest.h"

#include "mmpol/errors.hpp"
#include "mmpol/spectra.hpp"
#include "mmpol/sweep.hpp"
#include "mmpol/validate.hpp"

#include <random>

using namespace mmpol;

namespace {

std::vector<cplx> values(const std::vector<ComplexEigenpair>& pairs) {
    std::vector<cplx> out;
    for (const auto& p : pairs) out.push_back(p.lambda);
    return out;
}

SystemSpec fig4_at(double rabi) {
    auto s = preset_setup("fig4");
    s.Omega0 = rabi;
    return s.to_spec();
}

}  // namespace

TEST_CASE("diagonal matrix eigenvalues are its diagonal") {
    const SystemSpec spec(CavityModeSet::three_mode(2.0, 0.1, 1.0, 0.05), EmitterEnsemble::homogeneous(1, 2.1, 0.2),
                          CouplingMap::collective({{-1, 0.0}, {0, 0.0}, {1, 0.0}}));
    const auto m = build_dicke_matrix(spec);
    std::vector<cplx> diag;
    for (Eigen::Index i = 0; i < m.dim(); ++i) diag.push_back(m.entries(i, i));
    CHECK(max_matched_gap(values(eig_dense(m)), diag) < 1e-15);
    const auto fast = eig_arrowhead(m);
    CHECK(max_matched_gap(values(fast.pairs), diag) < 1e-15);
}

TEST_CASE("single-mode quadratic gives +/- Omega_0") {
    const SystemSpec spec(CavityModeSet({{0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{0, 0.35}}));
    const auto pairs = eig_arrowhead(build_dicke_matrix(spec)).pairs;
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].lambda.real() == doctest::Approx(-0.35).epsilon(1e-14));
    CHECK(pairs[1].lambda.real() == doctest::Approx(0.35).epsilon(1e-14));
}

TEST_CASE("arrowhead and dense solvers agree on the Fig. 4 system") {
    const auto m = build_dicke_matrix(fig4_at(0.3));
    const auto fast = eig_arrowhead(m);
    CHECK_FALSE(fast.dense_fallback);
    CHECK(max_matched_gap(values(fast.pairs), values(eig_dense(m))) < 1e-10);
    for (const auto& p : fast.pairs) {
        CHECK(std::abs(secular_function(m, p.lambda)) < 1e-9);
        CHECK((m.entries * p.vector - p.lambda * p.vector).norm() < 1e-10);
        CHECK(p.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("arrowhead solver falls back on degenerate coupled diagonals") {
    const SystemSpec spec(CavityModeSet({{-1, 2.0, 0.1}, {0, 2.0, 0.1}}), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{-1, 0.2}, {0, 0.3}}));
    const auto m = build_dicke_matrix(spec);
    const auto fast = eig_arrowhead(m);
    CHECK(fast.dense_fallback);
    CHECK(max_matched_gap(values(fast.pairs), values(eig_dense(m))) < 1e-12);
}

TEST_CASE("companion roots of a known cubic") {
    // (x - 1)(x + 2i)(x - 3) = x^3 + (-4 + 2i) x^2 + (3 - 8i) x + 6i
    const auto roots = companion_roots({cplx(6.0 * 0, 6.0), cplx(3.0, -8.0), cplx(-4.0, 2.0)});
    CHECK(max_matched_gap(roots, {cplx(1.0), cplx(0.0, -2.0), cplx(3.0)}) < 1e-12);
}

TEST_CASE("random Dicke specs: both solvers agree") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const auto m = build_dicke_matrix(random_dicke_spec(rng, 2 + k % 5));
        CHECK(max_matched_gap(values(eig_arrowhead(m).pairs), values(eig_dense(m))) < 1e-10);
    }
}

TEST_CASE("physical conversion and decoupled-mode calibration") {
    CHECK(bandwidth_convention_self_test(BandwidthConvention::calibrated));
    CHECK_FALSE(bandwidth_convention_self_test(BandwidthConvention::flipped));
    CHECK(physical_bandwidth(0.1, cplx(0.0, -0.025)) == doctest::Approx(0.15));
}

TEST_CASE("Fig. 4 branch values at Omega_0 = 0.3 match the numpy reference") {
    const auto branches = solve_dicke(fig4_at(0.3));
    REQUIRE(branches.size() == 4);
    const double energy[] = {1.319143507126546, 1.8923419474858307, 2.3787283370635057, 2.9097862083241166};
    const double width[] = {0.0929340621892468, 0.17574932826736578, 0.17458409413783096, 0.14473251540555626};
    const double exciton[] = {0.1610025914611437, 0.33411273998248814, 0.30802283663098207, 0.19701650368072096};
    for (int k = 0; k < 4; ++k) {
        CHECK(branches[k].energy == doctest::Approx(energy[k]).epsilon(1e-12));
        CHECK(branches[k].bandwidth == doctest::Approx(width[k]).epsilon(1e-10));
        CHECK(branches[k].exciton_fraction() == doctest::Approx(exciton[k]).epsilon(1e-10));
    }
    CHECK(branches[1].label.to_string() == "LP");
    CHECK(branches[2].label.to_string() == "UP");
}

TEST_CASE("Fig. 4 bandwidths stay within the bare rates") {
    for (double rabi : {0.1, 0.2, 0.35, 0.5}) {
        for (const auto& b : solve_dicke(fig4_at(rabi))) {
            CHECK(b.bandwidth >= 0.038 - 1e-9);
            CHECK(b.bandwidth <= 0.37 + 1e-9);
        }
    }
}

TEST_CASE("uncoupled system has no polaritons") {
    const SystemSpec spec(CavityModeSet::three_mode(2.0, 0.1, 1.0, 0.0), EmitterEnsemble::homogeneous(1, 2.05, 0.1),
                          CouplingMap::collective({{-1, 0.0}, {0, 0.0}, {1, 0.0}}));
    int dark = 0, photonic = 0;
    for (const auto& b : solve_dicke(spec)) {
        CHECK(b.label.kind != BranchLabel::Kind::lower_polariton);
        CHECK(b.label.kind != BranchLabel::Kind::upper_polariton);
        dark += b.label.kind == BranchLabel::Kind::dark;
        photonic += b.label.kind == BranchLabel::Kind::photonic;
    }
    CHECK(dark == 1);
    CHECK(photonic == 3);
}

TEST_CASE("label tracking follows nearest eigenvalues") {
    auto a = solve_dicke(fig4_at(0.3));
    auto b = solve_dicke(fig4_at(0.305));
    for (auto& br : b) br.label = {};
    track_labels(a, b);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].label == b[k].label);
    CHECK(match_eigenvalues({cplx(0.0), cplx(1.0)}, {cplx(1.1), cplx(0.1)}) == std::vector<std::size_t>{1, 0});
}
