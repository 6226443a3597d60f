#include "mmpol/adiabatic.hpp"

#include "mmpol/errors.hpp"

#include <cmath>

namespace mmpol {

namespace {

// Per-emitter matrices are only materialised up to this ensemble size.
constexpr int kMaxPairMatrix = 1024;

struct ModeWeights {
    int q;
    double shift;  // D / (D^2 + (dk/2)^2)
    double decay;  // (dk/2) / (D^2 + (dk/2)^2)
};

std::vector<ModeWeights> off_resonant_weights(const SystemSpec& spec) {
    std::vector<ModeWeights> out;
    for (const auto& m : spec.modes().modes()) {
        if (m.q == 0) continue;
        const double d = spec.modes().detuning(m.q);
        const double h = 0.5 * spec.modes().kappa_mismatch(m.q);
        const double den = d * d + h * h;
        if (den == 0.0)
            throw SingularModeError(m.q, "mode q=" + std::to_string(m.q) + " is degenerate with the reference mode");
        out.push_back({m.q, d / den, h / den});
    }
    return out;
}

void check_emitter(const SystemSpec& spec, int j) {
    if (j < 0 || j >= spec.emitters().count()) throw std::out_of_range("adiabatic: emitter index out of range");
}

}  // namespace

double one_body_shift(const SystemSpec& spec, int j) {
    check_emitter(spec, j);
    double sum = 0.0;
    for (const auto& w : off_resonant_weights(spec)) sum -= std::norm(spec.coupling(j, w.q)) * w.shift;
    return sum;
}

cplx two_body_coupling(const SystemSpec& spec, int i, int j) {
    check_emitter(spec, i);
    check_emitter(spec, j);
    cplx sum = 0.0;
    for (const auto& w : off_resonant_weights(spec))
        sum -= std::conj(spec.coupling(i, w.q)) * spec.coupling(j, w.q) * (0.5 * w.shift);
    return sum;
}

double one_body_decay(const SystemSpec& spec, int j) {
    check_emitter(spec, j);
    double sum = 0.0;
    for (const auto& w : off_resonant_weights(spec)) sum -= std::norm(spec.coupling(j, w.q)) * w.decay;
    return sum;
}

cplx two_body_loss(const SystemSpec& spec, int i, int j) {
    check_emitter(spec, i);
    check_emitter(spec, j);
    cplx sum = 0.0;
    for (const auto& w : off_resonant_weights(spec))
        sum -= std::conj(spec.coupling(i, w.q)) * spec.coupling(j, w.q) * w.decay;
    return sum;
}

AdiabaticCorrections effective_parameters(const SystemSpec& spec, EffectiveOptions options) {
    if (!spec.is_dicke())
        throw UnsupportedReduction("effective_parameters: needs homogeneous emitters with collective couplings");
    const int n = spec.emitters().count();
    const auto weights = off_resonant_weights(spec);

    AdiabaticCorrections out;
    out.thermodynamic_limit = options.thermodynamic_limit;
    for (const auto& w : weights) {
        const double rabi2 = spec.collective_rabi(w.q) * spec.collective_rabi(w.q);
        out.one_body_shift -= rabi2 / n * w.shift;
        out.one_body_decay -= rabi2 / n * w.decay;
        out.collective_shift -= rabi2 * 0.5 * w.shift;
        out.collective_loss -= rabi2 * w.decay;
    }
    if (n <= kMaxPairMatrix) {
        out.gamma_prime.assign(static_cast<std::size_t>(n), out.one_body_decay);
        out.gamma_dprime.assign(static_cast<std::size_t>(n), out.one_body_shift);
        out.j_prime = Eigen::MatrixXcd::Constant(n, n, out.collective_loss / n);
        out.j_dprime = Eigen::MatrixXcd::Constant(n, n, out.collective_shift / n);
    }

    const double delta0 = spec.emitter_detuning(0);
    const double dgamma = spec.emitter_decay_mismatch(0);
    out.delta_N = delta0 - out.collective_shift;
    out.delta_Gamma_N = -0.5 * dgamma + out.collective_loss;
    if (!options.thermodynamic_limit) {
        out.delta_N -= out.one_body_shift;
        out.delta_Gamma_N += out.one_body_decay;
    }
    return out;
}

double rabi_splitting_adiabatic(double collective_shift, double collective_loss, double delta0, double decay_mismatch,
                                double rabi0) {
    const cplx a(collective_shift - delta0, -(collective_loss - 0.5 * decay_mismatch));
    return std::sqrt(a * a + 4.0 * rabi0 * rabi0).real();
}

double rabi_splitting_adiabatic(const SystemSpec& spec) {
    const auto c = effective_parameters(spec);
    return rabi_splitting_adiabatic(c.collective_shift, c.collective_loss, spec.emitter_detuning(0),
                                    spec.emitter_decay_mismatch(0), spec.collective_rabi(0));
}

TwoBodyRate nj_prime_homogeneous(double rabi0, double f, double fsr, double zeta) {
    if (!(std::abs(f) < 1.0)) throw DomainError("nj_prime_homogeneous: requires |f| < 1");
    const double den = fsr * fsr + 0.25 * zeta * zeta;
    if (den == 0.0) throw DomainError("nj_prime_homogeneous: Delta and zeta both zero");
    const double lower = rabi0 * (1.0 - f);
    const double upper = rabi0 * (1.0 + f);
    return {(lower * lower - upper * upper) * 0.5 * zeta / den, zeta * f * rabi0 * rabi0 / den};
}

}  // namespace mmpol
