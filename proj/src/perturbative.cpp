#include "mmpol/perturbative.hpp"

#include "mmpol/errors.hpp"
#include "mmpol/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmpol {

ThreeModeArrowhead ThreeModeArrowhead::from_matrix(const DynamicalMatrix& matrix) {
    using K = BasisLabel::Kind;
    const std::vector<BasisLabel> expected{{K::mode, -1}, {K::mode, 0}, {K::mode, 1}, {K::collective, 0}};
    if (matrix.form != MatrixForm::arrowhead || matrix.basis != expected)
        throw UnsupportedReduction("perturbative: needs the (3+1) arrowhead matrix with modes q = -1, 0, +1");
    const auto& m = matrix.entries;
    ThreeModeArrowhead a;
    a.d_minus = m(0, 0);
    a.d_plus = m(2, 2);
    a.e_minus = m(0, 3);
    a.e_zero = m(1, 3);
    a.e_plus = m(2, 3);
    a.p = m(3, 3);
    a.kappa0 = matrix.frame.kappa0;
    return a;
}

double ThreeModeArrowhead::scale() const {
    const double s = std::max({std::abs(d_minus), std::abs(d_plus), std::abs(e_minus), std::abs(e_zero),
                               std::abs(e_plus), std::abs(p)});
    return s > 0.0 ? s : 1.0;
}

cplx phi(cplx lambda, const ThreeModeArrowhead& a) {
    if (lambda == cplx(0.0, 0.0) || lambda == a.d_minus || lambda == a.d_plus)
        throw PoleError("phi: lambda coincides with a pole");
    return a.p - lambda + a.e_zero * a.e_zero / lambda - a.e_minus * a.e_minus / (a.d_minus - lambda) -
           a.e_plus * a.e_plus / (a.d_plus - lambda);
}

cplx phi(cplx lambda, const DynamicalMatrix& matrix) { return phi(lambda, ThreeModeArrowhead::from_matrix(matrix)); }

std::pair<cplx, cplx> single_mode_roots(const ThreeModeArrowhead& a) {
    const cplx root = std::sqrt(0.25 * a.p * a.p + a.e_zero * a.e_zero);
    const cplx lo = 0.5 * a.p - root;
    const cplx hi = 0.5 * a.p + root;
    return lo.real() <= hi.real() ? std::pair{lo, hi} : std::pair{hi, lo};
}

cplx linearization_denominator(cplx l, const ThreeModeArrowhead& a) {
    const cplx e0 = a.e_zero * a.e_zero, em = a.e_minus * a.e_minus, ep = a.e_plus * a.e_plus;
    const cplx dm = a.d_minus, dp = a.d_plus, p = a.p;
    return dp * (e0 + em) + dm * (e0 + ep) - dm * dp * p - 2.0 * (e0 + em + ep - dp * p - dm * p - dm * dp) * l -
           3.0 * (dm + dp + p) * l * l + 4.0 * l * l * l;
}

namespace {

cplx reduced_denominator(cplx l, const ThreeModeArrowhead& a) {
    const cplx e0 = a.e_zero * a.e_zero, em = a.e_minus * a.e_minus, ep = a.e_plus * a.e_plus;
    const cplx dm = a.d_minus, dp = a.d_plus;
    return dp * (e0 + em) + dm * (e0 + ep) - 2.0 * (e0 + ep + em - dm * dp) * l - 3.0 * (dm + dp) * l * l +
           4.0 * l * l * l;
}

cplx correction_at(cplx l, const ThreeModeArrowhead& a) {
    const cplx em = a.e_minus * a.e_minus, ep = a.e_plus * a.e_plus;
    const cplx den = a.p == cplx(0.0, 0.0) ? reduced_denominator(l, a) : linearization_denominator(l, a);
    const double s = a.scale();
    if (std::abs(den) < 1e-12 * s * s * s) throw DomainError("x_correction: linearisation denominator is singular");
    return -l * (em * a.d_plus + ep * a.d_minus - (em + ep) * l) / den;
}

}  // namespace

PerturbativeResult x_correction(const DynamicalMatrix& matrix) {
    const auto a = ThreeModeArrowhead::from_matrix(matrix);
    const auto [lm, lp] = single_mode_roots(a);
    PerturbativeResult r;
    r.x_minus = correction_at(lm, a);
    r.x_plus = correction_at(lp, a);
    r.lambda_lp = lm + r.x_minus;
    r.lambda_up = lp + r.x_plus;
    r.E_LP = r.lambda_lp.real();
    r.E_UP = r.lambda_up.real();
    r.Gamma_LP = physical_bandwidth(a.kappa0, r.lambda_lp);
    r.Gamma_UP = physical_bandwidth(a.kappa0, r.lambda_up);
    r.Omega_R = r.E_UP - r.E_LP;
    return r;
}

double splitting_linear_zeta(double rabi, double fsr, double zeta) {
    if (!(fsr > 0.0)) throw DomainError("splitting_linear_zeta: requires Delta > 0");
    const double a = rabi * rabi + fsr * fsr;
    return 2.0 * rabi * (1.0 - rabi * rabi * a / (a * a + fsr * fsr * zeta * zeta));
}

BandwidthPair bandwidths_linear_zeta(double rabi, double fsr, double zeta, double kappa) {
    if (!(fsr > 0.0)) throw DomainError("bandwidths_linear_zeta: requires Delta > 0");
    const double a = rabi * rabi + fsr * fsr;
    const double shift = 2.0 * rabi * rabi * rabi * fsr * zeta / (a * a + fsr * fsr * zeta * zeta);
    return {kappa - shift, kappa + shift};
}

PrintedCorrections printed_corrections(double rabi, double fsr, double dk_minus, double dk_plus) {
    const double a = rabi * rabi + fsr * fsr;
    const double sum = dk_minus + dk_plus;
    const double diff = dk_minus - dk_plus;
    PrintedCorrections out;
    for (const double sign : {-1.0, 1.0}) {
        // Upper signs belong to x_+, lower signs to x_-.
        const double b = fsr * diff - sign * rabi * sum / 2.0;
        const double den = a * a + b * b;
        const double re = -sign * rabi * rabi * rabi * a * a / den;
        const double im2 = -sign * rabi * (rabi * sum * a / 2.0 + sign * rabi * rabi * b) / den;
        if (sign > 0) {
            out.re_x_plus = re;
            out.two_im_x_plus = im2;
        } else {
            out.re_x_minus = re;
            out.two_im_x_minus = im2;
        }
    }
    return out;
}

ExactComparison compare_with_exact(const DynamicalMatrix& matrix, const PerturbativeResult& result) {
    const auto pairs = eig_dense(matrix);
    auto nearest = [&](cplx target, std::size_t skip) {
        std::size_t best = pairs.size();
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (k == skip) continue;
            const double d = std::abs(pairs[k].lambda - target);
            if (d < dist) {
                dist = d;
                best = k;
            }
        }
        return best;
    };
    const std::size_t ilp = nearest(result.lambda_lp, pairs.size());
    const std::size_t iup = nearest(result.lambda_up, ilp);
    ExactComparison c;
    c.lambda_lp = pairs[ilp].lambda;
    c.lambda_up = pairs[iup].lambda;
    c.Omega_R = c.lambda_up.real() - c.lambda_lp.real();
    c.abs_gap = std::max(std::abs(c.lambda_lp - result.lambda_lp), std::abs(c.lambda_up - result.lambda_up));
    c.rel_gap_splitting = std::abs(result.Omega_R - c.Omega_R) / std::abs(c.Omega_R);
    return c;
}

}  // namespace mmpol
