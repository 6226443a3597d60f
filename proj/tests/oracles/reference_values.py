"""Independent reference values frozen into the C++ tests.

Builds the dynamical matrices from scratch with numpy and evaluates closed forms
directly. Run with python3; prints the numbers the tests compare against.
"""
import numpy as np


def dicke(omega_e, gamma, modes, rabi):
    """modes: list of (q, omega_q, kappa_q), rabi: q -> collective coupling."""
    ref = next(m for m in modes if m[0] == 0)
    w0, k0 = ref[1], ref[2]
    n = len(modes)
    m = np.zeros((n + 1, n + 1), complex)
    for k, (q, w, kap) in enumerate(modes):
        m[k, k] = (w - w0) - 0.5j * (kap - k0)
        m[k, n] = m[n, k] = rabi[q]
    m[n, n] = (omega_e - w0) + 0.5j * (k0 - gamma)
    return m, w0, k0


def physical(m, w0, k0):
    lam, vec = np.linalg.eig(m)
    order = np.argsort(lam.real)
    return [(w0 + lam[i].real, k0 - 2 * lam[i].imag, abs(vec[-1, i]) ** 2 / np.linalg.norm(vec[:, i]) ** 2)
            for i in order]


def fig4(rabi0, eps=0.0):
    modes = [(-1, 1.45 + eps, 0.038), (0, 2.14, 0.09), (1, 2.76 - eps, 0.09)]
    return dicke(2.15, 0.37, modes, {-1: rabi0, 0: rabi0, 1: rabi0})


def main():
    np.set_printoptions(precision=17)
    print("two-mode NJ'", -(0.35 ** 2) * 0.05 / (1.0 + 0.0025))
    om, f, d, z = 0.35, 0.05, 1.0, 0.1
    print("three-mode NJ' exact", ((om * (1 - f)) ** 2 - (om * (1 + f)) ** 2) * (z / 2) / (d * d + z * z / 4))
    print("three-mode NJ' approximate", z * f * om * om / (d * d + z * z / 4))

    om, d, z, kap = 0.35, 1.0, -0.1, 0.15
    a = om * om + d * d
    print("linear-zeta splitting", 2 * om * (1 - om * om * a / (a * a + d * d * z * z)))
    s = 2 * om ** 3 * d * z / (a * a + d * d * z * z)
    print("linear-zeta widths LP UP", kap - s, kap + s)

    for branch in physical(*fig4(0.3)):
        print("fig4 Omega0=0.3 E Gamma X", branch)

    m, w0, k0 = dicke(2.0, 0.1, [(-1, 1.0, 0.1), (0, 2.0, 0.1), (1, 3.0, 0.1)], {-1: 0.35, 0: 0.35, 1: 0.35})
    lam = np.linalg.eigvals(m)
    print("symmetric zeta=0 Delta=1 Omega=0.35 splitting exact", np.sort(lam.real)[-2] - np.sort(lam.real)[1])
    print("symmetric zeta=0 closed form", 2 * 0.35 * 1.0 / (1.0 + 0.35 ** 2))

    # Fig. 2b at delta_Omega = 0.05, delta_kappa = 0.1 (kappa_q = kappa0 + q delta_kappa).
    om, dk = 0.35, 0.1
    g = {-1: om - 0.05, 1: om + 0.05}
    dq = {-1: -1.0, 1: 1.0}
    dkq = {-1: -dk, 1: dk}
    den = {q: dq[q] ** 2 + (dkq[q] / 2) ** 2 for q in g}
    nj2 = -sum(g[q] ** 2 * (dq[q] / 2) / den[q] for q in g)
    nj1 = -sum(g[q] ** 2 * (dkq[q] / 2) / den[q] for q in g)
    print("fig2b point NJ'' NJ'", nj2, nj1)
    delta_n = 0.0 - nj2
    dgam_n = -0.0 / 2 + nj1
    print("fig2b point delta_N Delta_Gamma_N", delta_n, dgam_n)
    m2 = np.array([[0, om], [om, -delta_n - 1j * dgam_n]])
    l2 = np.sort(np.linalg.eigvals(m2).real)
    print("fig2b point 2x2 splitting", l2[1] - l2[0])


if __name__ == "__main__":
    main()
