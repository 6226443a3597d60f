#include "mmpol/spectra.hpp"

#include "mmpol/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace mmpol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void normalize_with_phase(Eigen::VectorXcd& v) {
    const double n = v.norm();
    if (n == 0.0) return;
    v /= n;
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double a = std::abs(v(k));
        if (a > best_abs * (1.0 + 1e-12)) {
            best = k;
            best_abs = a;
        }
    }
    v *= std::conj(v(best)) / best_abs;
    v(best) = best_abs;
}

void sort_pairs(std::vector<ComplexEigenpair>& pairs) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const ComplexEigenpair& a, const ComplexEigenpair& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
}

double matrix_scale(const Eigen::MatrixXcd& m) {
    const double s = m.cwiseAbs().maxCoeff();
    return s > 0.0 ? s : 1.0;
}

struct ArrowParts {
    Eigen::VectorXcd d;  // diagonal of the mode block
    Eigen::VectorXcd c;  // column entries M(k, corner)
    Eigen::VectorXcd r;  // row entries M(corner, k)
    cplx p;
};

ArrowParts split_arrowhead(const DynamicalMatrix& matrix) {
    const auto& m = matrix.entries;
    const Eigen::Index n = m.rows();
    if (n < 1 || m.cols() != n) throw UnsupportedReduction("arrowhead: matrix is not square");
    const Eigen::Index corner = n - 1;
    const double tol = 1e-14 * matrix_scale(m);
    for (Eigen::Index i = 0; i < corner; ++i) {
        for (Eigen::Index j = 0; j < corner; ++j) {
            if (i != j && std::abs(m(i, j)) > tol)
                throw UnsupportedReduction("arrowhead: nonzero entry outside diagonal and arrow");
        }
    }
    ArrowParts parts;
    parts.d = m.diagonal().head(corner);
    parts.c = m.col(corner).head(corner);
    parts.r = m.row(corner).head(corner).transpose();
    parts.p = m(corner, corner);
    return parts;
}

// Coefficients ascending in z; multiplies poly by (a - z).
void multiply_linear(std::vector<cplx>& poly, cplx a) {
    poly.push_back(0.0);
    for (std::size_t i = poly.size() - 1; i > 0; --i) poly[i] = a * poly[i] - poly[i - 1];
    poly[0] *= a;
}

struct Givens {
    cplx c{1.0, 0.0};
    cplx s{0.0, 0.0};
};

Givens make_givens(cplx x, cplx y) {
    const double r = std::hypot(std::abs(x), std::abs(y));
    if (r == 0.0) return {};
    return {x / r, y / r};
}

// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
std::vector<cplx> hessenberg_eigenvalues(Eigen::MatrixXcd h) {
    const Eigen::Index n = h.rows();
    std::vector<cplx> eig(static_cast<std::size_t>(n));
    if (n == 0) return eig;
    Eigen::Index hi = n - 1;
    int its = 0;
    int total = 0;
    const int max_total = 60 * static_cast<int>(n) + 100;
    std::vector<Givens> rot(static_cast<std::size_t>(n));
    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }
        Eigen::Index l = hi;
        for (; l > 0; --l) {
            const double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (std::abs(h(l, l - 1)) <= kEps * (s > 0.0 ? s : 1.0)) {
                h(l, l - 1) = 0.0;
                break;
            }
        }
        if (l == hi) {
            eig[static_cast<std::size_t>(hi)] = h(hi, hi);
            --hi;
            its = 0;
            continue;
        }
        if (++total > max_total) throw SolverError("companion QR did not converge", total);

        cplx mu;
        if (its > 0 && its % 10 == 0) {
            mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx half = 0.5 * (a - d);
            const cplx disc = std::sqrt(half * half + b * c);
            const cplx mu1 = 0.5 * (a + d) + disc;
            const cplx mu2 = 0.5 * (a + d) - disc;
            mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
        }
        ++its;

        for (Eigen::Index k = l; k <= hi; ++k) h(k, k) -= mu;
        for (Eigen::Index k = l; k < hi; ++k) {
            const Givens g = make_givens(h(k, k), h(k + 1, k));
            rot[static_cast<std::size_t>(k)] = g;
            for (Eigen::Index j = k; j <= hi; ++j) {
                const cplx t1 = h(k, j), t2 = h(k + 1, j);
                h(k, j) = std::conj(g.c) * t1 + std::conj(g.s) * t2;
                h(k + 1, j) = -g.s * t1 + g.c * t2;
            }
        }
        for (Eigen::Index k = l; k < hi; ++k) {
            const Givens& g = rot[static_cast<std::size_t>(k)];
            for (Eigen::Index i = l; i <= std::min(k + 1, hi); ++i) {
                const cplx t1 = h(i, k), t2 = h(i, k + 1);
                h(i, k) = t1 * g.c + t2 * g.s;
                h(i, k + 1) = -t1 * std::conj(g.s) + t2 * std::conj(g.c);
            }
        }
        for (Eigen::Index k = l; k <= hi; ++k) h(k, k) += mu;
    }
    return eig;
}

cplx phi_value(const ArrowParts& a, const std::vector<Eigen::Index>& coupled, cplx lambda, cplx* derivative) {
    cplx value = a.p - lambda;
    cplx slope = -1.0;
    for (Eigen::Index k : coupled) {
        const cplx den = a.d(k) - lambda;
        if (den == cplx(0.0, 0.0)) throw PoleError("secular function evaluated on a pole");
        const cplx w = a.c(k) * a.r(k);
        value -= w / den;
        slope -= w / (den * den);
    }
    if (derivative) *derivative = slope;
    return value;
}

ArrowheadSpectrum dense_fallback(const DynamicalMatrix& matrix) {
    return {eig_dense(matrix), true};
}

}  // namespace

// --------------------------------- eig_dense ---------------------------------

std::vector<ComplexEigenpair> eig_dense(const DynamicalMatrix& matrix) {
    const auto& m = matrix.entries;
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_dense: matrix is not square");
    std::vector<ComplexEigenpair> pairs;
    if (m.rows() == 0) return pairs;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
    if (solver.info() != Eigen::Success)
        throw SolverError("eig_dense: complex Schur iteration failed", static_cast<int>(solver.getMaxIterations()));
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        Eigen::VectorXcd v = solver.eigenvectors().col(k);
        normalize_with_phase(v);
        pairs.push_back({solver.eigenvalues()(k), std::move(v)});
    }
    sort_pairs(pairs);
    return pairs;
}

// ------------------------------- arrowhead path ------------------------------

std::vector<cplx> companion_roots(const std::vector<cplx>& c) {
    const auto n = static_cast<Eigen::Index>(c.size());
    if (n == 0) return {};
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) h(0, j) = -c[static_cast<std::size_t>(n - 1 - j)];
    for (Eigen::Index i = 1; i < n; ++i) h(i, i - 1) = 1.0;
    return hessenberg_eigenvalues(std::move(h));
}

cplx secular_function(const DynamicalMatrix& arrowhead, cplx lambda) {
    const ArrowParts a = split_arrowhead(arrowhead);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(a.d.size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    return phi_value(a, all, lambda, nullptr);
}

ArrowheadSpectrum eig_arrowhead(const DynamicalMatrix& matrix) {
    const ArrowParts a = split_arrowhead(matrix);
    const Eigen::Index n = matrix.dim();
    const Eigen::Index corner = n - 1;
    const double scale = matrix_scale(matrix.entries);

    std::vector<Eigen::Index> coupled, decoupled;
    for (Eigen::Index k = 0; k < corner; ++k) {
        const bool zc = a.c(k) == cplx(0.0, 0.0);
        const bool zr = a.r(k) == cplx(0.0, 0.0);
        if (zc != zr) return dense_fallback(matrix);
        (zc ? decoupled : coupled).push_back(k);
    }
    for (std::size_t i = 0; i < coupled.size(); ++i) {
        for (std::size_t j = i + 1; j < coupled.size(); ++j) {
            if (std::abs(a.d(coupled[i]) - a.d(coupled[j])) <= 1e-12 * scale) return dense_fallback(matrix);
        }
    }

    ArrowheadSpectrum out;
    for (Eigen::Index k : decoupled) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v(k) = 1.0;
        out.pairs.push_back({a.d(k), std::move(v)});
    }

    // chi(z) in units of `scale`, then made monic.
    std::vector<cplx> chi{a.p / scale, -1.0};
    for (Eigen::Index k : coupled) multiply_linear(chi, a.d(k) / scale);
    for (Eigen::Index k : coupled) {
        std::vector<cplx> term{-a.c(k) * a.r(k) / (scale * scale)};
        for (Eigen::Index r : coupled) {
            if (r != k) multiply_linear(term, a.d(r) / scale);
        }
        for (std::size_t i = 0; i < term.size(); ++i) chi[i] += term[i];
    }
    const cplx lead = chi.back();
    std::vector<cplx> monic(chi.size() - 1);
    for (std::size_t i = 0; i + 1 < chi.size(); ++i) monic[i] = chi[i] / lead;

    for (cplx z : companion_roots(monic)) {
        cplx lambda = z * scale;
        for (int step = 0; step < 2; ++step) {
            try {
                cplx slope;
                const cplx f0 = phi_value(a, coupled, lambda, &slope);
                if (slope == cplx(0.0, 0.0)) break;
                const cplx trial = lambda - f0 / slope;
                if (std::abs(phi_value(a, coupled, trial, nullptr)) < std::abs(f0)) lambda = trial;
            } catch (const PoleError&) {
                break;
            }
        }
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v(corner) = 1.0;
        for (Eigen::Index k : coupled) v(k) = a.c(k) / (lambda - a.d(k));
        normalize_with_phase(v);
        if ((matrix.entries * v - lambda * v).norm() > 1e-9 * scale) return dense_fallback(matrix);
        out.pairs.push_back({lambda, std::move(v)});
    }
    sort_pairs(out.pairs);
    return out;
}

// ------------------------------ physical reading -----------------------------

double physical_bandwidth(double kappa0, cplx lambda, BandwidthConvention convention) {
    const double s = convention == BandwidthConvention::calibrated ? -1.0 : 1.0;
    return kappa0 + s * 2.0 * lambda.imag();
}

std::string BranchLabel::to_string() const {
    switch (kind) {
        case Kind::unlabeled: return "unlabeled";
        case Kind::lower_polariton: return "LP";
        case Kind::upper_polariton: return "UP";
        case Kind::dark: return "dark";
        case Kind::photonic: return "photonic(" + std::to_string(mode) + ")";
    }
    return "?";
}

double PolaritonBranch::exciton_fraction() const {
    double sum = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].kind != BasisLabel::Kind::mode) sum += std::norm(amplitudes(static_cast<Eigen::Index>(k)));
    }
    return sum;
}

double PolaritonBranch::photon_fraction(int q) const {
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k] == BasisLabel{BasisLabel::Kind::mode, q}) return std::norm(amplitudes(static_cast<Eigen::Index>(k)));
    }
    return 0.0;
}

std::map<int, double> PolaritonBranch::photon_fractions() const {
    std::map<int, double> out;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].kind == BasisLabel::Kind::mode)
            out[basis[k].index] = std::norm(amplitudes(static_cast<Eigen::Index>(k)));
    }
    return out;
}

std::vector<PolaritonBranch> to_physical(const std::vector<ComplexEigenpair>& pairs, const DynamicalMatrix& matrix,
                                         BandwidthConvention convention) {
    std::vector<PolaritonBranch> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        PolaritonBranch b;
        b.lambda = pair.lambda;
        b.energy = matrix.frame.omega0 + pair.lambda.real();
        b.bandwidth = physical_bandwidth(matrix.frame.kappa0, pair.lambda, convention);
        b.amplitudes = pair.vector;
        b.basis = matrix.basis;
        out.push_back(std::move(b));
    }
    return out;
}

void classify_branches(std::vector<PolaritonBranch>& branches, const SystemSpec& spec) {
    const auto& em = spec.emitters();
    double omega_e = 0.0;
    for (int i = 0; i < em.count(); ++i) omega_e += em.omega(i);
    omega_e /= em.count();

    constexpr double kSideTol = 1e-9;
    constexpr double kMinExciton = 0.01;
    auto pick = [&](bool below) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t k = 0; k < branches.size(); ++k) {
            const double e = branches[k].energy;
            if (below ? !(e < omega_e - kSideTol) : !(e > omega_e + kSideTol)) continue;
            const double x = branches[k].exciton_fraction();
            if (x <= kMinExciton) continue;
            if (!best) {
                best = k;
                continue;
            }
            const double xb = branches[*best].exciton_fraction();
            if (x > xb + 1e-12 || (std::abs(x - xb) <= 1e-12 && e < branches[*best].energy)) best = k;
        }
        return best;
    };

    for (auto& b : branches) b.label = {};
    const auto lp = pick(true);
    const auto up = pick(false);
    if (lp) branches[*lp].label = {BranchLabel::Kind::lower_polariton, 0};
    if (up) branches[*up].label = {BranchLabel::Kind::upper_polariton, 0};
    for (auto& b : branches) {
        if (b.label.kind != BranchLabel::Kind::unlabeled) continue;
        const auto fractions = b.photon_fractions();
        int best_q = 0;
        double best_w = -1.0;
        for (const auto& [q, w] : fractions) {
            if (w > best_w + 1e-12) {
                best_q = q;
                best_w = w;
            }
        }
        if (b.exciton_fraction() > best_w)
            b.label = {BranchLabel::Kind::dark, 0};
        else
            b.label = {BranchLabel::Kind::photonic, best_q};
    }
}

std::vector<std::size_t> match_eigenvalues(const std::vector<cplx>& previous, const std::vector<cplx>& next) {
    if (previous.size() != next.size()) throw std::invalid_argument("match_eigenvalues: sizes differ");
    const std::size_t n = previous.size();
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    cand.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) cand.emplace_back(std::abs(previous[i] - next[j]), i, j);
    }
    std::sort(cand.begin(), cand.end());
    std::vector<std::size_t> result(n, n);
    std::vector<bool> used(n, false);
    for (const auto& [dist, i, j] : cand) {
        if (result[i] != n || used[j]) continue;
        result[i] = j;
        used[j] = true;
    }
    return result;
}

void track_labels(const std::vector<PolaritonBranch>& previous, std::vector<PolaritonBranch>& next) {
    std::vector<cplx> a, b;
    for (const auto& x : previous) a.push_back(x.lambda);
    for (const auto& x : next) b.push_back(x.lambda);
    const auto m = match_eigenvalues(a, b);
    for (std::size_t i = 0; i < m.size(); ++i) next[m[i]].label = previous[i].label;
}

double max_matched_gap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const auto m = match_eigenvalues(a, b);
    double gap = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[m[i]]));
    return gap;
}

bool bandwidth_convention_self_test(BandwidthConvention convention) {
    const double kappa0 = 0.1, zeta = 0.07;
    const SystemSpec spec(CavityModeSet::three_mode(2.0, kappa0, 0.8, zeta), EmitterEnsemble::homogeneous(1, 2.0, 0.1),
                          CouplingMap::collective({{-1, 0.2}, {0, 0.3}, {1, 0.0}}));
    const auto matrix = build_dicke_matrix(spec);
    const auto branches = to_physical(eig_arrowhead(matrix).pairs, matrix, convention);
    for (const auto& b : branches) {
        if (b.photon_fraction(1) > 0.999999) return std::abs(b.bandwidth - (kappa0 + zeta)) <= 1e-12;
    }
    return false;
}

std::vector<PolaritonBranch> solve_dicke(const SystemSpec& spec) {
    const auto matrix = build_dicke_matrix(spec);
    auto branches = to_physical(eig_arrowhead(matrix).pairs, matrix);
    classify_branches(branches, spec);
    return branches;
}

}  // namespace mmpol
