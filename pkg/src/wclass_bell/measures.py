"""Nonlocality, concurrence, negativity and linear entropy of qubit pairs.

Each quantity has two independent routes:

* a matrix path working on any two-qubit density matrix (Pauli correlation
  matrix, Wootters spectrum, partial transpose, purity), and
* a closed form in the three occupation probabilities of a W-class state.

The closed forms are what the scan uses; the matrix path audits them.
Closed-form functions accept a :class:`Probabilities` or an array whose last
axis holds the probability triple, and broadcast over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConsistencyError, NumericalError
from .states import PAIRS, PairId, Probabilities, WClassState, as_pair, probabilities, to_density

VIOLATION_TOL = 1e-12
CROSS_PATH_TOL = 1e-9
IMAG_TOL = 1e-12
NEG_EIG_TOL = 1e-10

_YY = linalg.kron(linalg.SIGMA_Y, linalg.SIGMA_Y)
# _PAULI_PAIRS[n, m] = sigma_n (x) sigma_m
_PAULI_PAIRS = np.array([[np.kron(a, b) for b in linalg.PAULIS] for a in linalg.PAULIS])


@dataclass(frozen=True)
class PairMeasures:
    m: float
    c: float
    n: float
    e: float

    @property
    def violates(self) -> bool:
        """Bell-CHSH violation, i.e. ``M > 1`` beyond round-off."""
        return self.m > 1.0 + VIOLATION_TOL

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.m, self.c, self.n, self.e)


def _triple(p) -> np.ndarray:
    if isinstance(p, Probabilities):
        return p.as_array()
    return np.asarray(p, dtype=float)


def _split(p, pair):
    """(spectator, x, y) probabilities for ``pair``.

    The spectator is the amplitude whose excitation sits on the traced qubit.
    """
    p = _triple(p)
    k = as_pair(pair).traced
    s = 3 - k
    x, y = [idx for idx in range(3) if idx != s]
    return p[..., s], p[..., x], p[..., y]


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def nonlocality_closed(p, pair):
    s, x, y = _split(p, pair)
    return _out(np.maximum((s - x - y) ** 2 + 4 * x * y, 8 * x * y))


def concurrence_closed(p, pair):
    _, x, y = _split(p, pair)
    return _out(np.sqrt(4 * x * y))


def negativity_closed(p, pair):
    s, x, y = _split(p, pair)
    return _out(np.sqrt(s * s + 4 * x * y) - s)


def linear_entropy_closed(p, pair):
    _, x, y = _split(p, pair)
    return _out(8.0 / 3.0 * (-(x * x) + x - y * y + y - 2 * x * y))


def closed_form_measures(p) -> dict[str, np.ndarray]:
    """Arrays ``m, c, n, e`` of shape ``(..., 3)``, last axis over pairs 12, 13, 23."""
    p = _triple(p)
    fns = {"m": nonlocality_closed, "c": concurrence_closed,
           "n": negativity_closed, "e": linear_entropy_closed}
    return {k: np.stack([np.asarray(f(p, pair)) for pair in PAIRS], axis=-1) for k, f in fns.items()}


# -- matrix path -----------------------------------------------------------

def correlation_matrix(rho) -> np.ndarray:
    """Real 3x3 matrix ``t[n, m] = Tr(rho sigma_n (x) sigma_m)`` (stacks allowed)."""
    rho = linalg.as_matrix(rho, dims=(4,))
    t = np.einsum("nmab,...ba->...nm", _PAULI_PAIRS, rho)
    resid = np.max(np.abs(t.imag)) if t.size else 0.0
    if resid >= IMAG_TOL:
        raise NumericalError(f"correlation matrix has imaginary residue {resid:.3e}")
    return t.real


def nonlocality_matrix_path(rho):
    """Sum of the two largest eigenvalues of ``T^T T``."""
    t = correlation_matrix(rho)
    u = np.swapaxes(t, -1, -2) @ t
    vals, _ = linalg.jacobi_eigh(u)
    return _out(vals[..., 0] + vals[..., 1])


def _sqrt_psd(vals):
    if np.any(vals < -NEG_EIG_TOL):
        raise NumericalError(f"density matrix has eigenvalue {vals.min():.3e} < 0")
    return np.sqrt(np.clip(vals, 0.0, None))


def wootters_roots(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho (sy sy) rho* (sy sy)``, descending.

    They are the singular values of ``sqrt(rho) (sy sy) sqrt(rho)^T``, read off
    the Hermitian matrix ``[[0, X], [X^H, 0]]`` whose spectrum is ``+-sigma``.
    Going through singular values avoids square-rooting eigenvalues that sit
    at round-off level, which would amplify 1e-17 noise to 1e-9.
    """
    rho = linalg.as_matrix(rho, dims=(4,))
    root = linalg.hermitian_function(rho, _sqrt_psd)
    x = root @ _YY @ np.swapaxes(root, -1, -2)
    zero = np.zeros_like(x)
    aug = np.concatenate(
        [np.concatenate([zero, x], axis=-1),
         np.concatenate([np.conj(np.swapaxes(x, -1, -2)), zero], axis=-1)],
        axis=-2,
    )
    vals = linalg.eigvalsh(aug)
    return np.abs(vals[..., :4])


def concurrence_matrix_path(rho):
    r = wootters_roots(rho)
    return _out(np.maximum(r[..., 0] - r[..., 1] - r[..., 2] - r[..., 3], 0.0))


def negativity_matrix_path(rho):
    vals = linalg.eigvalsh(linalg.partial_transpose(rho))
    return _out(np.maximum(0.0, -2.0 * vals[..., -1]))


def linear_entropy_matrix_path(rho):
    rho = linalg.as_matrix(rho, dims=(4,))
    purity = np.sum(np.abs(rho) ** 2, axis=(-1, -2))
    e = 4.0 / 3.0 * (1.0 - purity)
    if np.any(e < -1e-12) or np.any(e > 1.0 + 1e-12):
        raise NumericalError(f"linear entropy outside [0, 1]: {e}")
    return _out(np.clip(e, 0.0, 1.0))


def matrix_path_measures(rhos) -> dict[str, np.ndarray]:
    """Matrix-path ``m, c, n, e`` for a stack of two-qubit density matrices."""
    rhos = linalg.as_matrix(rhos, dims=(4,))
    linalg.check_density(rhos)
    return {
        "m": np.asarray(nonlocality_matrix_path(rhos)),
        "c": np.asarray(concurrence_matrix_path(rhos)),
        "n": np.asarray(negativity_matrix_path(rhos)),
        "e": np.asarray(linear_entropy_matrix_path(rhos)),
    }


# -- per-state aggregation -------------------------------------------------

def all_pairs(state: WClassState, verify: bool = False) -> tuple[PairMeasures, PairMeasures, PairMeasures]:
    """Closed-form measures for pairs 12, 13, 23.

    With ``verify`` the matrix path is evaluated too and any difference above
    1e-9 raises :class:`ConsistencyError`.
    """
    p = probabilities(state).as_array()
    closed = closed_form_measures(p)
    if verify:
        rho = to_density(state)
        rhos = np.stack([linalg.partial_trace(rho, pair.traced) for pair in PAIRS])
        mat = matrix_path_measures(rhos)
        for key in "mcne":
            diff = np.max(np.abs(closed[key] - mat[key]))
            if diff > CROSS_PATH_TOL:
                raise ConsistencyError(
                    f"{key.upper()} differs between closed form and matrix path by {diff:.3e} "
                    f"at P = {tuple(p)}"
                )
    return tuple(
        PairMeasures(*(float(closed[k][idx]) for k in "mcne")) for idx in range(3)
    )


def ckw_residual(state: WClassState) -> float:
    """Largest ``|C_ij^2 + C_ik^2 - 4 det(rho_i)|`` over the three qubits."""
    rho = to_density(state)
    pm = dict(zip(PAIRS, all_pairs(state)))
    worst = 0.0
    for q in (1, 2, 3):
        rho_q = linalg.reduce_qubits(rho, [q])
        det = (rho_q[0, 0] * rho_q[1, 1] - rho_q[0, 1] * rho_q[1, 0]).real
        c2 = sum(pm[pair].c ** 2 for pair in PAIRS if q in pair)
        worst = max(worst, abs(c2 - 4.0 * det))
    return worst


__all__ = [
    "PairId", "PairMeasures", "PAIRS", "VIOLATION_TOL", "all_pairs", "ckw_residual",
    "closed_form_measures", "concurrence_closed", "concurrence_matrix_path",
    "correlation_matrix", "linear_entropy_closed", "linear_entropy_matrix_path",
    "matrix_path_measures", "negativity_closed", "negativity_matrix_path",
    "nonlocality_closed", "nonlocality_matrix_path", "wootters_roots",
]
