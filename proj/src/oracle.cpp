#include "mmpol/oracle.hpp"

#include "mmpol/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmpol {

namespace {

constexpr double kMaxStepRatio = 0.05;
const cplx kI(0.0, 1.0);

struct Generator {
    Eigen::MatrixXcd a;  // dx/dt = -i a x
    std::vector<BasisLabel> basis;
};

// Rotating-frame generator written out from the system parameters.
Generator rotating_generator(const SystemSpec& spec, bool collective) {
    const auto& modes = spec.modes();
    const double w0 = modes.reference().omega;
    const double k0 = modes.reference().kappa;
    const int m = static_cast<int>(modes.size());
    const int n = collective ? 1 : spec.emitters().count();
    Generator g;
    g.a = Eigen::MatrixXcd::Zero(m + n, m + n);
    for (int a = 0; a < m; ++a) {
        const auto& mode = modes.modes()[static_cast<std::size_t>(a)];
        g.basis.push_back({BasisLabel::Kind::mode, mode.q});
        g.a(a, a) = cplx(mode.omega - w0, -0.5 * (mode.kappa - k0));
    }
    for (int j = 0; j < n; ++j) {
        const int row = m + j;
        const double wj = spec.emitters().omega(j);
        const double gj = spec.emitters().gamma(j);
        g.basis.push_back(collective ? BasisLabel{BasisLabel::Kind::collective, 0}
                                     : BasisLabel{BasisLabel::Kind::emitter, j});
        g.a(row, row) = cplx(wj - w0, 0.5 * (k0 - gj));
        for (int a = 0; a < m; ++a) {
            const int q = modes.modes()[static_cast<std::size_t>(a)].q;
            const cplx c = collective ? cplx(spec.collective_rabi(q), 0.0) : spec.coupling(j, q);
            g.a(row, a) = c;
            g.a(a, row) = std::conj(c);
        }
    }
    return g;
}

void rk4_step(const Eigen::MatrixXcd& a, Eigen::VectorXcd& x, double dt) {
    const Eigen::VectorXcd k1 = -kI * (a * x);
    const Eigen::VectorXcd k2 = -kI * (a * (x + 0.5 * dt * k1));
    const Eigen::VectorXcd k3 = -kI * (a * (x + 0.5 * dt * k2));
    const Eigen::VectorXcd k4 = -kI * (a * (x + dt * k3));
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

long step_count(double t_final, double dt) {
    const double ratio = t_final / dt;
    auto n = static_cast<long>(std::llround(ratio));
    if (std::abs(static_cast<double>(n) - ratio) > 1e-9 * std::max(1.0, ratio)) n = static_cast<long>(std::ceil(ratio));
    return n;
}

double positive_min(std::initializer_list<double> values, double fallback) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (v > 0.0) best = std::min(best, v);
    }
    return std::isfinite(best) ? best : fallback;
}

std::vector<cplx> sorted(std::vector<cplx> v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

// Least-squares residual of Y against the exponential basis at the given frequencies.
struct Projection {
    Eigen::MatrixXcd residual;
    double norm2 = 0.0;
};

// Rows are weighted by `w` so that growing and decaying channels count alike.
Projection project(const std::vector<double>& t, const Eigen::VectorXd& w, const Eigen::MatrixXcd& y,
                   const std::vector<cplx>& lambdas) {
    const auto rows = static_cast<Eigen::Index>(t.size());
    const auto cols = static_cast<Eigen::Index>(lambdas.size());
    Eigen::MatrixXcd b(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k) {
        for (Eigen::Index m = 0; m < cols; ++m)
            b(k, m) = w(k) * std::exp(-kI * lambdas[static_cast<std::size_t>(m)] * t[static_cast<std::size_t>(k)]);
    }
    const Eigen::MatrixXcd wy = w.asDiagonal() * y;
    Projection p;
    p.residual = wy - b * b.colPivHouseholderQr().solve(wy);
    p.norm2 = p.residual.squaredNorm();
    return p;
}

}  // namespace

double rate_scale(const SystemSpec& spec) {
    const auto& modes = spec.modes();
    double s = 0.0;
    for (const auto& m : modes.modes()) {
        s = std::max({s, std::abs(modes.detuning(m.q)), spec.mode_coupling_norm(m.q), m.kappa});
    }
    for (int i = 0; i < spec.emitters().count(); ++i)
        s = std::max({s, std::abs(spec.emitter_detuning(i)), spec.emitters().gamma(i)});
    return s > 0.0 ? s : 1.0;
}

Trajectory propagate(const SystemSpec& spec, const Eigen::VectorXcd& initial, double t_final, double dt,
                     PropagationOptions options) {
    if (!(dt > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("propagate: need dt > 0 and t_final >= 0");
    if (options.store_every < 1) throw std::invalid_argument("propagate: store_every must be >= 1");
    const auto m = static_cast<Eigen::Index>(spec.modes().size());
    bool collective = false;
    if (initial.size() == m + spec.emitters().count()) {
        collective = false;
    } else if (spec.is_dicke() && initial.size() == m + 1) {
        collective = true;
    } else {
        throw ConfigurationError("propagate: initial state has " + std::to_string(initial.size()) +
                                 " entries, which matches neither the full nor the collective basis");
    }

    const Frame frame{spec.modes().reference().omega, spec.modes().reference().kappa};
    const cplx wt = frame.complex_frequency();
    Generator gen = rotating_generator(spec, collective);
    double scale = rate_scale(spec);
    if (options.integrate_in_lab) {
        gen.a += wt * Eigen::MatrixXcd::Identity(gen.a.rows(), gen.a.cols());
        scale = std::max(scale, std::abs(wt));
    }
    const double dt_max = kMaxStepRatio / scale;
    if (dt > dt_max * (1.0 + 1e-12))
        throw StepSizeError("propagate: dt exceeds 0.05 / rate scale", dt_max);

    const long steps = step_count(t_final, dt);
    const long stored = steps / options.store_every + 1;

    Trajectory tr;
    tr.basis = gen.basis;
    tr.frame = frame;
    tr.output = options.output;
    tr.spectral_bound = rotating_generator(spec, collective).a.cwiseAbs().rowwise().sum().maxCoeff();
    tr.amplitudes.resize(stored, initial.size());
    tr.times.reserve(static_cast<std::size_t>(stored));
    tr.norm_series.reserve(static_cast<std::size_t>(stored));

    Eigen::VectorXcd x = initial;
    Eigen::Index row = 0;
    auto record = [&](long step) {
        const double t = static_cast<double>(step) * dt;
        const cplx to_lab = options.integrate_in_lab ? cplx(1.0, 0.0) : std::exp(-kI * wt * t);
        const cplx to_rot = options.integrate_in_lab ? std::exp(kI * wt * t) : cplx(1.0, 0.0);
        const cplx factor = options.output == OutputFrame::lab ? to_lab : to_rot;
        tr.times.push_back(t);
        tr.amplitudes.row(row++) = (factor * x).transpose();
        tr.norm_series.push_back(x.squaredNorm() * std::norm(to_lab));
    };
    record(0);
    for (long s = 1; s <= steps; ++s) {
        rk4_step(gen.a, x, dt);
        if (s % options.store_every == 0) record(s);
    }
    tr.amplitudes.conservativeResize(row, Eigen::NoChange);
    return tr;
}

Horizon default_horizon(const SystemSpec& spec) {
    double kmin = std::numeric_limits<double>::infinity();
    for (const auto& m : spec.modes().modes()) kmin = std::min(kmin, m.kappa > 0.0 ? m.kappa : kmin);
    for (int i = 0; i < spec.emitters().count(); ++i) {
        const double g = spec.emitters().gamma(i);
        if (g > 0.0) kmin = std::min(kmin, g);
    }
    const double scale = rate_scale(spec);
    const double slowest = positive_min({kmin, spec.mode_coupling_norm(0)}, scale);
    Horizon h;
    h.dt = 0.5 * kMaxStepRatio / scale;
    h.t_final = std::min(50.0 / slowest, 1e5 * h.dt);
    return h;
}

FrequencyFit fit_complex_frequencies(const Trajectory& tr, int n) {
    const auto total = static_cast<Eigen::Index>(tr.times.size());
    if (n < 1) throw std::invalid_argument("fit_complex_frequencies: n_expected must be >= 1");
    if (total < 3 * n + 2) throw std::invalid_argument("fit_complex_frequencies: trajectory too short");
    const double h = tr.times[1] - tr.times[0];
    const double bound = std::max(tr.spectral_bound, 1e-12);

    // Sample spacing keeps |Re lambda| tau below the aliasing limit.
    const auto stride = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(2.5 / (bound * h))));
    const Eigen::Index k_count = (total - 1) / stride + 1;
    if (k_count < 3 * n + 2) throw std::invalid_argument("fit_complex_frequencies: too few samples after striding");
    const double tau = static_cast<double>(stride) * h;
    const cplx wt = tr.frame.complex_frequency();

    const Eigen::Index channels = tr.amplitudes.cols();
    Eigen::MatrixXcd y(k_count, channels);
    std::vector<double> t(static_cast<std::size_t>(k_count));
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const Eigen::Index src = k * stride;
        const double time = tr.times[static_cast<std::size_t>(src)];
        const cplx demod = tr.output == OutputFrame::lab ? std::exp(kI * wt * time) : cplx(1.0, 0.0);
        y.row(k) = demod * tr.amplitudes.row(src);
        t[static_cast<std::size_t>(k)] = time - tr.times.front();
    }

    // Forward linear prediction shared by every channel.
    const Eigen::Index rows_per = k_count - n;
    Eigen::MatrixXcd lp(rows_per * channels, n);
    Eigen::VectorXcd rhs(rows_per * channels);
    for (Eigen::Index c = 0; c < channels; ++c) {
        for (Eigen::Index k = n; k < k_count; ++k) {
            const Eigen::Index r = c * rows_per + (k - n);
            for (Eigen::Index j = 1; j <= n; ++j) lp(r, j - 1) = y(k - j, c);
            rhs(r) = -y(k, c);
            const double norm = std::sqrt(lp.row(r).squaredNorm() + std::norm(rhs(r)));
            if (norm > 0.0) {
                lp.row(r) /= norm;
                rhs(r) /= norm;
            }
        }
    }
    const Eigen::VectorXcd coeff = lp.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -coeff(j);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> roots(companion, false);
    if (roots.info() != Eigen::Success) throw SolverError("fit_complex_frequencies: root extraction failed", 0);
    std::vector<cplx> lambdas;
    for (Eigen::Index j = 0; j < n; ++j) lambdas.push_back(kI * std::log(roots.eigenvalues()(j)) / tau);

    // Gauss-Newton on a thinned copy of the samples.
    const Eigen::Index thin = std::max<Eigen::Index>(1, (k_count * channels) / 20000);
    std::vector<double> tt;
    std::vector<Eigen::Index> picks;
    for (Eigen::Index k = 0; k < k_count; k += thin) {
        picks.push_back(k);
        tt.push_back(t[static_cast<std::size_t>(k)]);
    }
    Eigen::MatrixXcd yy(static_cast<Eigen::Index>(picks.size()), channels);
    Eigen::VectorXd weight(static_cast<Eigen::Index>(picks.size()));
    for (std::size_t k = 0; k < picks.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        yy.row(r) = y.row(picks[k]);
        const double norm = yy.row(r).norm();
        weight(r) = norm > 0.0 ? 1.0 / norm : 0.0;
    }
    const double ynorm2 = std::max((weight.asDiagonal() * yy).squaredNorm(), std::numeric_limits<double>::min());

    Projection cur = project(tt, weight, yy, lambdas);
    const double fd = 1e-7 * bound;
    for (int it = 0; it < 20 && cur.norm2 > 1e-28 * ynorm2; ++it) {
        const Eigen::Index rres = cur.residual.size();
        Eigen::MatrixXd jac(2 * rres, 2 * n);
        for (int j = 0; j < 2 * n; ++j) {
            auto trial = lambdas;
            trial[static_cast<std::size_t>(j / 2)] += (j % 2 == 0) ? cplx(fd, 0.0) : cplx(0.0, fd);
            const Eigen::MatrixXcd d = (project(tt, weight, yy, trial).residual - cur.residual) / fd;
            const Eigen::Map<const Eigen::VectorXcd> dv(d.data(), d.size());
            jac.col(j) << dv.real(), dv.imag();
        }
        const Eigen::Map<const Eigen::VectorXcd> rv(cur.residual.data(), rres);
        Eigen::VectorXd r(2 * rres);
        r << rv.real(), rv.imag();
        const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
        bool accepted = false;
        for (double damp = 1.0; damp > 1e-3; damp *= 0.5) {
            auto trial = lambdas;
            for (int j = 0; j < n; ++j)
                trial[static_cast<std::size_t>(j)] += damp * cplx(step(2 * j), step(2 * j + 1));
            Projection next = project(tt, weight, yy, trial);
            if (next.norm2 < cur.norm2) {
                lambdas = std::move(trial);
                cur = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    FrequencyFit fit;
    fit.lambdas = sorted(lambdas);
    fit.relative_residual = std::sqrt(cur.norm2 / ynorm2);
    const double span = tt.back();
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        for (std::size_t j = i + 1; j < lambdas.size(); ++j) min_sep = std::min(min_sep, std::abs(lambdas[i] - lambdas[j]));
    }
    fit.low_confidence = min_sep * span < 1.0 || fit.relative_residual > 1e-6;
    return fit;
}

AdiabaticReport verify_adiabatic(const SystemSpec& spec, EffectiveOptions options) {
    const auto& modes = spec.modes();
    const int n = spec.emitters().count();
    const auto m = static_cast<Eigen::Index>(modes.size());
    const auto ref = static_cast<Eigen::Index>(modes.position(0));

    AdiabaticReport report;
    double min_detuning = std::numeric_limits<double>::infinity();
    for (const auto& mode : modes.modes()) {
        if (mode.q == 0) continue;
        report.in_regime = report.in_regime && spec.quasi_static_valid(mode.q);
        min_detuning = std::min(min_detuning, std::abs(modes.detuning(mode.q)));
    }
    const double rabi0 = spec.mode_coupling_norm(0);
    report.coupling_ratio = std::isfinite(min_detuning) && min_detuning > 0.0 ? rabi0 / min_detuning : 0.0;
    report.horizon = rabi0 > 0.0 ? 1.0 / rabi0 : 1.0 / rate_scale(spec);

    // Bright emitter combination.
    Eigen::VectorXcd bright(n);
    for (int j = 0; j < n; ++j) bright(j) = std::conj(spec.coupling(j, 0));
    if (bright.norm() > 0.0)
        bright.normalize();
    else
        bright.setConstant(1.0 / std::sqrt(static_cast<double>(n)));

    const Generator full = rotating_generator(spec, false);
    Eigen::VectorXcd x_full = Eigen::VectorXcd::Zero(m + n);
    x_full.tail(n) = bright;

    Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(1 + n, 1 + n);
    for (int j = 0; j < n; ++j) {
        reduced(1 + j, 0) = spec.coupling(j, 0);
        reduced(0, 1 + j) = std::conj(spec.coupling(j, 0));
        reduced(1 + j, 1 + j) = full.a(m + j, m + j);
    }
    for (Eigen::Index a = 0; a < m; ++a) {
        if (a == ref) continue;
        const int q = modes.modes()[static_cast<std::size_t>(a)].q;
        const cplx d = full.a(a, a);
        if (d == cplx(0.0, 0.0))
            throw SingularModeError(q, "verify_adiabatic: mode q=" + std::to_string(q) + " is degenerate with q=0");
        cplx slaved = 0.0;
        for (int j = 0; j < n; ++j) slaved -= std::conj(spec.coupling(j, q)) * bright(j) / d;
        x_full(a) = slaved;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) reduced(1 + j, 1 + i) -= spec.coupling(j, q) * std::conj(spec.coupling(i, q)) / d;
        }
    }
    Eigen::VectorXcd x_red(1 + n);
    x_red(0) = 0.0;
    x_red.tail(n) = bright;

    std::optional<Eigen::MatrixXcd> two;
    Eigen::VectorXcd x_two(2);
    if (spec.is_dicke()) {
        two = build_effective_two_level(spec, effective_parameters(spec, options)).entries;
        x_two << 0.0, bright.sum() / std::sqrt(static_cast<double>(n));
    }

    const double scale = rate_scale(spec);
    const long steps = std::max<long>(200, static_cast<long>(std::ceil(report.horizon * scale / 0.01)));
    const double dt = report.horizon / static_cast<double>(steps);
    double dev_red = 0.0, dev_two = 0.0;
    for (long s = 1; s <= steps; ++s) {
        rk4_step(full.a, x_full, dt);
        rk4_step(reduced, x_red, dt);
        Eigen::VectorXcd sub(1 + n);
        sub(0) = x_full(ref);
        sub.tail(n) = x_full.tail(n);
        dev_red = std::max(dev_red, (sub - x_red).norm());
        if (two) {
            rk4_step(*two, x_two, dt);
            const cplx collective = x_full.tail(n).sum() / std::sqrt(static_cast<double>(n));
            dev_two = std::max(dev_two, std::hypot(std::abs(x_full(ref) - x_two(0)), std::abs(collective - x_two(1))));
        }
    }
    report.deviation_reduced = dev_red;
    if (two) report.deviation_two_level = dev_two;
    return report;
}

}  // namespace mmpol
