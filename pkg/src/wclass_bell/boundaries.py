"""Analytic boundary curves, threshold constants and region classifiers.

All curve functions broadcast over numpy arrays and raise
:class:`~wclass_bell.errors.ValidationError` outside their domain (small
round-off excursions of 1e-12 are clamped).  The ``violation_region_*``
classifiers decide, from a pair's (C, N), (C, E) or (N, E) coordinates alone,
whether it violates the Bell-CHSH inequality.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError

DOMAIN_TOL = 1e-12
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Thresholds:
    c_star: float = 1 / math.sqrt(2)
    e_star: float = 4 * (math.sqrt(2) - 1) / 3
    m_jk_star: float = (1 - math.sqrt(8 * math.sqrt(2) - 11)) / 2
    n_one: float = 1 / math.sqrt(2) - 1 + math.sqrt(2 - math.sqrt(2))
    n_two: float = 0.5 * (1 / math.sqrt(2) - 1 + math.sqrt(3.5 - math.sqrt(2)))


THRESHOLDS = Thresholds()
C_STAR = THRESHOLDS.c_star
E_STAR = THRESHOLDS.e_star
M_JK_STAR = THRESHOLDS.m_jk_star
N_ONE = THRESHOLDS.n_one
N_TWO = THRESHOLDS.n_two


class Region(enum.IntEnum):
    FULFILLING = 0
    VIOLATING = 1
    BOUNDARY = 2


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _domain(x, lo, hi, name, lo_open=False, hi_open=False):
    x = np.asarray(x, dtype=float)
    bad = (x < lo - DOMAIN_TOL) | (x > hi + DOMAIN_TOL) | ~np.isfinite(x)
    if lo_open:
        bad |= x <= lo
    if hi_open:
        bad |= x >= hi
    if np.any(bad):
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise ValidationError(f"{name}: argument outside {lb}{lo}, {hi}{rb}")
    return np.clip(x, lo, hi)


# -- nonlocality-parameter relations ----------------------------------------

def m_complement(m_jk):
    """Largest partner value ``2 - M_jk``, reached when the other two pairs tie."""
    m = _domain(m_jk, 0.0, 2.0, "m_complement")
    return _out(2.0 - m)


def pure_reduced_probs(m_jk: float) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """Both probability triples with ``P_001 = 0`` whose other pairs have ``M = m_jk``.

    The 1-2 reduction of these states is pure and its nonlocality is ``2 - m_jk``.
    """
    m = float(_domain(m_jk, 0.0, 1.0, "pure_reduced_probs"))
    r = math.sqrt(m)
    hi, lo = 0.5 * (1 + r), 0.5 * (1 - r)
    return (0.0, hi, lo), (0.0, lo, hi)


def m_lower_boundary(m_jk):
    """Lower edge of ``M_ik`` against ``M_jk`` among states whose pair ij violates.

    Valid for ``0 <= m_jk < M_JK_STAR``.
    """
    m = _domain(m_jk, 0.0, M_JK_STAR, "m_lower_boundary", hi_open=True)
    r2m = np.sqrt(2 * m)
    q = np.sqrt(4 + 4 * r2m - 6 * m)
    inner = 2 - q + (3 * np.sqrt(2 + 2 * r2m - 3 * m) - 2 * math.sqrt(2)) * np.sqrt(m) + 3 * m
    return _out((2 - q + r2m) * (q + 6 - r2m - 2 * np.sqrt(inner)) / 16)


def m_sum_surface(m_values) -> float:
    """``M_12 + M_13 + M_23``; states on the dash-dotted edge have sum 2."""
    return _out(np.sum(np.asarray(m_values, dtype=float), axis=-1))


# -- negativity against concurrence -------------------------------------------

def negativity_violation_lower(c):
    """Lower negativity edge of the violating states for ``C <= 1/sqrt(2)`` (strict)."""
    c = _domain(c, 0.0, C_STAR, "negativity_violation_lower")
    s = np.sqrt(1 - c * c)
    return _out(0.5 * (-1 + s + np.sqrt(np.clip(2 + 3 * c * c - 2 * s, 0.0, None))))


def verstraete_min_negativity(c):
    """Smallest negativity any two-qubit state of concurrence ``c`` can have."""
    c = _domain(c, 0.0, 1.0, "verstraete_min_negativity")
    return _out(np.sqrt((1 - c) ** 2 + c * c) - (1 - c))


@dataclass(frozen=True)
class NegativityInterval:
    lower: float
    upper: float
    lower_inclusive: bool


def negativity_violation_bounds(c: float) -> NegativityInterval:
    """Negativity range of violating states at concurrence ``c``."""
    c = float(_domain(c, 0.0, 1.0, "negativity_violation_bounds"))
    if c <= C_STAR:
        return NegativityInterval(negativity_violation_lower(c), c, lower_inclusive=False)
    return NegativityInterval(verstraete_min_negativity(c), c, lower_inclusive=True)


# -- linear entropy against concurrence ---------------------------------------

def entropy_violation_low(c):
    """``(2/3) C^2``: states on it have ``M = 1``; violating ones lie strictly below."""
    c = _domain(c, 0.0, C_STAR, "entropy_violation_low")
    return _out(2.0 / 3.0 * c * c)


def entropy_max_vs_concurrence(c):
    """``(8/3)(C - C^2)``: largest linear entropy at concurrence ``C >= 1/2``."""
    c = _domain(c, 0.5, 1.0, "entropy_max_vs_concurrence")
    return _out(8.0 / 3.0 * (c - c * c))


@dataclass(frozen=True)
class EntropyBounds:
    violation_bound: float
    strict: bool
    max_entropy: float | None


def entropy_bounds_vs_concurrence(c: float) -> EntropyBounds:
    c = float(_domain(c, 0.0, 1.0, "entropy_bounds_vs_concurrence"))
    max_e = entropy_max_vs_concurrence(c) if c >= 0.5 else None
    if c <= C_STAR:
        return EntropyBounds(entropy_violation_low(c), True, max_e)
    return EntropyBounds(8.0 / 3.0 * (c - c * c), False, max_e)


# -- linear entropy against negativity ----------------------------------------

def entropy_at_unit_m(n):
    """Linear entropy of the ``M = 1`` edge as a function of negativity (``N <= 2/3``)."""
    n = _domain(n, 0.0, 2.0 / 3.0, "entropy_at_unit_m")
    return _out(n * (2 + n - np.sqrt(np.clip(-(2 + n) * (-2 + 3 * n), 0.0, None))) / 3)


def entropy_at_c_star(n):
    """Linear entropy of the states with concurrence ``1/sqrt(2)`` (``N > 0``)."""
    n = _domain(n, 0.0, 1.0, "entropy_at_c_star", lo_open=True)
    return _out((1 - 2 * n * n) * (-1 + 4 * n + 2 * n * n) / (6 * n * n))


def entropy_upper_vs_negativity(n):
    """Upper linear-entropy edge of the violating states at negativity ``n``."""
    n = _domain(n, 0.0, 1.0, "entropy_upper_vs_negativity")
    r = np.sqrt(2 * (n + n * n))
    return _out(-8 * (-1 - n + r) * (-n + r) / 3)


def entropy_boundary_vs_negativity(n: float) -> tuple[float | None, float | None]:
    """Both negativity-parametrised edge values; ``None`` where a branch is undefined."""
    n = float(n)
    first = entropy_at_unit_m(n) if 0.0 <= n <= 2.0 / 3.0 else None
    second = entropy_at_c_star(n) if 0.0 < n <= 1.0 else None
    return first, second


# -- nonlocality against linear entropy ---------------------------------------

def m_max_vs_entropy(e):
    """Largest nonlocality parameter compatible with linear entropy ``e``."""
    e = _domain(e, 0.0, 2.0 / 3.0, "m_max_vs_entropy")
    return _out((2 + np.sqrt(np.clip(4 - 6 * e, 0.0, None))) ** 2 / 8)


def werner_like_family(alpha: float) -> tuple[np.ndarray, float]:
    """Mixture ``alpha |Psi+><Psi+| + (1 - alpha) |11><11|`` and its linear entropy.

    For ``alpha >= 1/2`` these states sit on the ``m_max_vs_entropy`` envelope.
    """
    a = float(_domain(alpha, 0.0, 1.0, "werner_like_family"))
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[1, 2] = rho[2, 1] = rho[2, 2] = a / 2
    rho[3, 3] = 1 - a
    return rho, 8.0 / 3.0 * (a - a * a)


# -- region classifiers -------------------------------------------------------

def _regions(violating, boundary):
    out = np.where(boundary, Region.BOUNDARY, np.where(violating, Region.VIOLATING, Region.FULFILLING))
    return Region(int(out)) if out.ndim == 0 else out


def violation_region_cn(c, n):
    """Classify from concurrence and negativity."""
    c = np.asarray(c, dtype=float)
    n = np.asarray(n, dtype=float)
    low = c <= C_STAR
    lower = negativity_violation_lower(np.minimum(c, C_STAR))
    violating = np.where(low, n > lower + BOUNDARY_TOL, True)
    boundary = low & (np.abs(n - lower) <= BOUNDARY_TOL)
    return _regions(violating, boundary)


def violation_region_ce(c, e):
    """Classify from concurrence and linear entropy."""
    c = np.asarray(c, dtype=float)
    e = np.asarray(e, dtype=float)
    low = c <= C_STAR
    bound = entropy_violation_low(np.minimum(c, C_STAR))
    upper = 8.0 / 3.0 * (c - c * c)
    violating = np.where(low, e < bound - BOUNDARY_TOL, e <= upper + BOUNDARY_TOL)
    boundary = low & (np.abs(e - bound) <= BOUNDARY_TOL)
    return _regions(violating, boundary)


def violation_region_vs_negativity(n, e, middle=(N_ONE, N_TWO), combine="any"):
    """Classify from negativity and linear entropy.

    Three negativity bands: below ``middle[0]`` a pair violates iff ``E`` lies
    under the ``M = 1`` edge; above ``middle[1]`` iff ``E`` is at most the upper
    edge; inside the band either condition (``combine="any"``) or both
    (``combine="all"``).  The default band ``[N_ONE, N_TWO]`` with ``"any"`` is
    the reading confirmed by the Monte Carlo scan; other values exist so the
    scan can test the alternatives.  Negativities falling in no band (an empty
    or inverted ``middle``) are reported as ``BOUNDARY``.
    """
    n = np.asarray(n, dtype=float)
    e = np.asarray(e, dtype=float)
    lo, hi = middle
    n_unit = np.clip(n, 0.0, 2.0 / 3.0)
    unit = entropy_at_unit_m(n_unit)
    under_unit = e < unit - BOUNDARY_TOL
    on_unit = np.abs(e - unit) <= BOUNDARY_TOL
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        c_star_edge = entropy_at_c_star(np.clip(n, 1e-150, 1.0))
    upper = entropy_upper_vs_negativity(np.clip(n, 0.0, 1.0))
    below_upper = e <= upper + BOUNDARY_TOL
    above_c_star = e > c_star_edge + BOUNDARY_TOL

    band_low = n <= lo
    band_high = n >= hi
    band_mid = (n >= lo) & (n <= hi) & (lo <= hi)
    mid_second = above_c_star & below_upper
    if combine == "any":
        mid = under_unit | mid_second
    elif combine == "all":
        mid = under_unit & mid_second
    else:
        raise ValueError(f"combine must be 'any' or 'all', got {combine!r}")

    violating = np.where(band_low, under_unit, np.where(band_high, below_upper, mid))
    boundary = (band_low & on_unit) | ~(band_low | band_high | band_mid)
    return _regions(violating, boundary)


# -- named curve registry -----------------------------------------------------

@dataclass(frozen=True)
class BoundaryCurve:
    name: str
    domain: tuple[float, float]
    func: Callable = field(repr=False)
    style: str = "solid"
    domain_open: tuple[bool, bool] = (False, False)

    def __call__(self, x):
        return self.func(x)

    def polyline(self, x0=None, x1=None, steps=200) -> tuple[np.ndarray, np.ndarray]:
        """Sample the curve on ``steps`` equal segments of ``[x0, x1]``.

        Defaults to the whole domain, pulled in slightly at open ends.
        """
        lo, hi = self.domain
        if x0 is None:
            x0 = lo + (1e-9 if self.domain_open[0] else 0.0)
        if x1 is None:
            x1 = hi - (1e-9 if self.domain_open[1] else 0.0)
        if steps < 1:
            raise ValidationError("steps must be >= 1")
        x = np.linspace(float(x0), float(x1), int(steps) + 1)
        return x, np.asarray(self.func(x), dtype=float)


CURVES: dict[str, BoundaryCurve] = {
    c.name: c
    for c in (
        BoundaryCurve("m_complement", (0.0, 2.0), m_complement),
        BoundaryCurve("m_lower_boundary", (0.0, M_JK_STAR), m_lower_boundary, "dot-dashed", (False, True)),
        BoundaryCurve("negativity_violation_lower", (0.0, C_STAR), negativity_violation_lower),
        BoundaryCurve("verstraete_min_negativity", (0.0, 1.0), verstraete_min_negativity, "dashed"),
        BoundaryCurve("negativity_max", (0.0, 1.0), lambda c: _out(_domain(c, 0.0, 1.0, "negativity_max")), "dashed"),
        BoundaryCurve("entropy_violation_low", (0.0, C_STAR), entropy_violation_low),
        BoundaryCurve("entropy_max_vs_concurrence", (0.5, 1.0), entropy_max_vs_concurrence, "dashed"),
        BoundaryCurve("entropy_at_unit_m", (0.0, 2.0 / 3.0), entropy_at_unit_m),
        BoundaryCurve("entropy_at_c_star", (N_ONE, N_TWO), entropy_at_c_star, "dot-dashed"),
        BoundaryCurve("entropy_upper_vs_negativity", (N_ONE, 1.0), entropy_upper_vs_negativity),
        BoundaryCurve("m_max_vs_entropy", (0.0, 2.0 / 3.0), m_max_vs_entropy),
    )
}
