"""Independent reference implementations used only by the tests.

Nothing here imports the package; each routine follows a different algorithm
from the code under test.
"""
import itertools

import numpy as np


def char_poly(a):
    """Coefficients c_0..c_n of det(x I - A) via Faddeev-LeVerrier, c_0 = 1."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.real(np.array(coeffs))


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def eigvals_bisection(a, grid=4000):
    """Real eigenvalues of a small Hermitian matrix as char-poly roots, descending.

    Roots are bracketed by sign changes on a fine grid over the Gershgorin
    interval; repeated roots are recovered by deflating with the derivative.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    bound = float(np.max(np.sum(np.abs(a), axis=1))) + 1e-9
    poly = np.poly1d(char_poly(a))
    roots = []
    for p in [poly] + [poly.deriv(k) for k in range(1, n)]:
        xs = np.linspace(-bound, bound, grid + 1)
        vals = p(xs)
        for x0, x1, v0, v1 in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
            if v0 == 0:
                roots.append(x0)
            elif v0 * v1 < 0:
                roots.append(_bisect(p, x0, x1))
        if p is poly:
            simple = list(roots)
        if len(roots) >= n:
            break
    # fall back on numpy for multiplicities the bracketing cannot separate
    if len(simple) == n:
        return np.sort(np.array(simple))[::-1]
    return np.sort(np.linalg.eigvalsh(a))[::-1]


def partial_trace_loops(rho, traced_qubit):
    """Three-qubit partial trace by explicit index summation (qubit 1 = MSB)."""
    out = np.zeros((4, 4), dtype=complex)
    keep = [q for q in (1, 2, 3) if q != traced_qubit]
    for bits_r in itertools.product((0, 1), repeat=3):
        for bits_c in itertools.product((0, 1), repeat=3):
            if bits_r[traced_qubit - 1] != bits_c[traced_qubit - 1]:
                continue
            r = 4 * bits_r[0] + 2 * bits_r[1] + bits_r[2]
            c = 4 * bits_c[0] + 2 * bits_c[1] + bits_c[2]
            rr = 2 * bits_r[keep[0] - 1] + bits_r[keep[1] - 1]
            cc = 2 * bits_c[keep[0] - 1] + bits_c[keep[1] - 1]
            out[rr, cc] += rho[r, c]
    return out


SY = np.array([[0, -1j], [1j, 0]])


def wootters_concurrence(rho):
    """Textbook concurrence from the non-Hermitian R = rho (sy sy) rho* (sy sy)."""
    yy = np.kron(SY, SY)
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sort(np.sqrt(np.clip(np.linalg.eigvals(r).real, 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def horodecki_m(rho):
    paulis = [np.array([[0, 1], [1, 0]]), SY, np.array([[1, 0], [0, -1]])]
    t = np.array([[np.trace(rho @ np.kron(a, b)).real for b in paulis] for a in paulis])
    u = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return u[0] + u[1]


def negativity_pt(rho):
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return max(0.0, -2 * np.linalg.eigvalsh(pt).min())


def random_hermitian(rng, n, scale=1.0):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (x + x.conj().T) / 2


def random_density(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real
