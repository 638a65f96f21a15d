"""Invariant suite run over a seeded scan.

Every check yields a :class:`Check`; a failed check carries the probability
triple of one offending state when there is one.  :func:`run_verification`
never raises on a counterexample, the caller decides what to do with the
report (the CLI turns any failure into exit code 3).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import boundaries as bd
from .errors import ConsistencyError, InvariantViolation
from .measures import CROSS_PATH_TOL, VIOLATION_TOL, closed_form_measures, matrix_path_measures
from .scan import DEFAULT_N, KEYS, ScanResult, empirical_envelope, run_scan
from .states import PAIRS, Sector, reduced_densities, sample_amplitudes

INVARIANT_TOL = 1e-9
ENVELOPE_GAP = 0.02
ENVELOPE_BINS = 200
FIG6_MIN_COUNT = 100
MIN_COUNT = 50
LOCUS_MIN_COUNT = 500
CROSS_PATH_N = 10_000
DUALITY_N = 100_000
DUALITY_MATRIX_N = 1_000
DUALITY_TOL = 1e-12
GRID = 101


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    counterexample: tuple[float, float, float] | None = None


@dataclass
class VerificationReport:
    n: int
    seed: int
    checks: list[Check] = field(default_factory=list)
    resolved_interval: tuple[float, float] | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "passed": self.passed,
            "resolved_interval": list(self.resolved_interval) if self.resolved_interval else None,
            "checks": [asdict(c) for c in self.checks],
        }


def _binned(check: Check, gap: np.ndarray, label: str, limit: float = ENVELOPE_GAP) -> None:
    """Fold a per-bin deviation into ``check``; no populated bins means nothing to compare."""
    if gap.size == 0:
        check.detail += f"; {label}: no well-populated bins, skipped"
        return
    check.detail += f"; {label} {gap.max():.4f}"
    if gap.max() > limit:
        check.passed = False


def _triple(probs, row) -> tuple[float, float, float]:
    return tuple(float(x) for x in probs[int(row)])


def _zero(name, bad, probs, detail) -> Check:
    """Pass iff the boolean array ``bad`` (shape (n,) or (n, 3)) is all False."""
    bad = np.asarray(bad)
    rows = np.nonzero(bad.reshape(bad.shape[0], -1).any(axis=1))[0]
    if rows.size == 0:
        return Check(name, True, f"{detail}: 0 counterexamples")
    return Check(name, False, f"{detail}: {rows.size} counterexamples", _triple(probs, rows[0]))


# -- individual checks ---------------------------------------------------------

def check_cross_path(seed: int, n: int, sector=Sector.SINGLE) -> Check:
    """Closed forms against the density-matrix path for every pair of ``n`` states."""
    amps = sample_amplitudes(n, seed)
    probs = np.abs(amps) ** 2
    closed = closed_form_measures(probs)
    mat = matrix_path_measures(reduced_densities(amps, sector))
    worst = {k: float(np.max(np.abs(closed[k] - mat[k]))) for k in KEYS}
    bad = np.zeros(probs.shape[0], dtype=bool)
    for k in KEYS:
        bad |= (np.abs(closed[k] - mat[k]) > CROSS_PATH_TOL).any(axis=1)
    detail = f"{n} states, max |diff| " + " ".join(f"{k.upper()}={v:.1e}" for k, v in worst.items())
    return _zero("cross_path", bad, probs, detail)


def check_like_monogamy(res: ScanResult) -> Check:
    count = np.sum(res.measures["m"] > 1.0 + INVARIANT_TOL, axis=1)
    return _zero("like_monogamy", count > 1, res.probs, "states with two or more M > 1")


def check_concurrence_threshold(res: ScanResult) -> Check:
    c, m = res.measures["c"], res.measures["m"]
    check = _zero("concurrence_threshold", (c > bd.C_STAR + INVARIANT_TOL) & (m <= 1.0), res.probs,
                  "C > 1/sqrt(2) without violation")
    partial = int(np.sum(res.violating & (c <= bd.C_STAR)))
    check.detail += f"; violating pairs with C <= 1/sqrt(2): {partial}"
    if partial == 0:
        check.passed = False
    return check


def check_entropy_threshold(res: ScanResult) -> Check:
    bad = res.violating & (res.measures["e"] >= bd.E_STAR - INVARIANT_TOL)
    return _zero("entropy_threshold", bad, res.probs, "violating pairs with E >= e*")


def check_m_entropy_envelope(res: ScanResult, bins: int = ENVELOPE_BINS) -> Check:
    """Pointwise bound plus binned maxima hugging the analytic curve from below."""
    e, m = res.measures["e"], res.measures["m"]
    hi = 2.0 / 3.0
    over = m > bd.m_max_vs_entropy(np.clip(e, 0.0, hi)) + INVARIANT_TOL
    check = _zero("m_entropy_envelope", over, res.probs, "M above the envelope")
    env = empirical_envelope(e, m, bins, (0.0, hi))
    full = env.count >= FIG6_MIN_COUNT
    gap = bd.m_max_vs_entropy(env.centers[full]) - env.ymax[full]
    above = env.ymax[full] - bd.m_max_vs_entropy(env.edges[:-1][full])
    check.detail += f"; {int(full.sum())} bins with >= {FIG6_MIN_COUNT} samples"
    _binned(check, gap, "max gap below the curve at bin centres")
    _binned(check, above, "max excess over the curve at left bin edges", INVARIANT_TOL)
    return check


def check_werner_family() -> Check:
    """The mixed family attains the M-vs-E envelope on alpha in [1/2, 1]."""
    alphas = np.linspace(0.5, 1.0, GRID)
    rhos, es = zip(*(bd.werner_like_family(a) for a in alphas))
    m = matrix_path_measures(np.stack(rhos))["m"]
    diff = np.abs(m - bd.m_max_vs_entropy(np.array(es)))
    worst = float(diff.max())
    return Check("werner_family", worst <= INVARIANT_TOL,
                 f"{GRID} alpha values in [1/2, 1], max |M - envelope| = {worst:.1e}")


def check_verstraete(res: ScanResult, bins: int = ENVELOPE_BINS) -> Check:
    c, n = res.measures["c"], res.measures["n"]
    bad = (n > c + INVARIANT_TOL) | (n < bd.verstraete_min_negativity(c) - INVARIANT_TOL)
    check = _zero("verstraete_bounds", bad, res.probs, "N outside Verstraete bounds")
    env = empirical_envelope(c, n, bins, (0.0, 1.0))
    full = env.count >= MIN_COUNT
    gap = np.abs(env.ymin[full] - bd.verstraete_min_negativity(env.centers[full]))
    _binned(check, gap, "binned minimum vs the lower bound")
    return check


def check_entropy_concurrence(res: ScanResult, bins: int = ENVELOPE_BINS) -> Check:
    c, e = res.measures["c"], res.measures["e"]
    with np.errstate(invalid="ignore"):
        bad = (c >= 0.5) & (e > 8.0 / 3.0 * (c - c * c) + INVARIANT_TOL)
    check = _zero("entropy_concurrence", bad, res.probs, "C >= 1/2 with E above (8/3)(C - C^2)")
    # violating/fulfilling border for C <= 1/sqrt(2): highest E among violating pairs
    low = res.violating & (c <= bd.C_STAR)
    env = empirical_envelope(c[low], e[low], bins, (0.0, bd.C_STAR))
    full = env.count >= MIN_COUNT
    gap = np.abs(env.ymax[full] - bd.entropy_violation_low(env.centers[full]))
    _binned(check, gap, "violating border vs (2/3)C^2")
    return check


def _misclassified(region, violating):
    region = np.asarray(region)
    undecided = region == bd.Region.BOUNDARY
    wrong = ~undecided & ((region == bd.Region.VIOLATING) != violating)
    return wrong | undecided


def check_classifier(name, region, res: ScanResult) -> Check:
    bad = _misclassified(region, res.violating)
    return _zero(name, bad, res.probs, "pairs misclassified against M > 1")


BRANCH_READINGS = {
    "[N_I, N_II], any": ((bd.N_ONE, bd.N_TWO), "any"),
    "[N_I, N_II], all": ((bd.N_ONE, bd.N_TWO), "all"),
    "[N_II, N_I], any": ((bd.N_TWO, bd.N_ONE), "any"),
    "[N_II, N_I], all": ((bd.N_TWO, bd.N_ONE), "all"),
}


def check_branch_order(res: ScanResult) -> tuple[Check, tuple[float, float] | None]:
    """Try each reading of the piecewise (N, E) classifier; the resolved one misclassifies nothing."""
    n, e = res.measures["n"], res.measures["e"]
    counts = {}
    first_bad = {}
    for label, (middle, combine) in BRANCH_READINGS.items():
        bad = _misclassified(bd.violation_region_vs_negativity(n, e, middle, combine), res.violating)
        counts[label] = int(bad.sum())
        rows = np.nonzero(bad.any(axis=1))[0]
        first_bad[label] = _triple(res.probs, rows[0]) if rows.size else None
    detail = "; ".join(f"{k}: {v}" for k, v in counts.items())
    resolved = None
    for label, (middle, _) in BRANCH_READINGS.items():
        if counts[label] == 0:
            resolved = (min(middle), max(middle))
            break
    ok = counts["[N_I, N_II], any"] == 0
    if resolved is not None:
        detail += f"; resolved middle interval [{resolved[0]:.10f}, {resolved[1]:.10f}]"
    return Check("branch_order", ok, detail, None if ok else first_bad["[N_I, N_II], any"]), resolved


def check_sector_duality(seed: int, n: int, single: ScanResult | None = None) -> Check:
    """Double-sector scan against the single-sector one, closed forms and matrix path."""
    a = single if single is not None and len(single) == n else run_scan(n, seed, Sector.SINGLE, audit_fraction=0)
    b = run_scan(n, seed, Sector.DOUBLE, audit_fraction=0)
    worst = max(float(np.max(np.abs(a.measures[k] - b.measures[k]))) for k in KEYS)
    k = min(n, DUALITY_MATRIX_N)
    amps = sample_amplitudes(k, seed)
    ms = matrix_path_measures(reduced_densities(amps, Sector.SINGLE))
    md = matrix_path_measures(reduced_densities(amps, Sector.DOUBLE))
    worst_mat = max(float(np.max(np.abs(ms[key] - md[key]))) for key in KEYS)
    ok = worst <= DUALITY_TOL and worst_mat <= DUALITY_TOL
    return Check("sector_duality", ok,
                 f"{n} states, closed-form max |diff| {worst:.1e}; {k} states through the matrix path, "
                 f"max |diff| {worst_mat:.1e}")


def check_m_sum(res: ScanResult) -> Check:
    s = res.m_sum
    i = int(np.argmin(s))
    ok = s[i] >= 2.0 - 0.01
    return Check("m_sum_lower", bool(ok), f"min M12 + M13 + M23 = {s[i]:.7f}",
                 None if ok else _triple(res.probs, i))


def check_lower_locus(res: ScanResult, bins: int = ENVELOPE_BINS) -> Check:
    """Compare the dash-dotted edge of the M plane with the two candidate loci.

    For every violating pair ij, bin M_jk and take the smallest M_ik.  The
    binned minimum is compared with ``m_lower_boundary``; the M sum of the
    minimising states is reported against 2.
    """
    m = res.measures["m"]
    xs, ys, sums = [], [], []
    for vi, (i, j) in enumerate(PAIRS):
        for other in range(3):
            if other == vi:
                continue
            # the remaining pair is the third one
            third = 3 - vi - other
            rows = res.violating[:, vi]
            xs.append(m[rows, other])
            ys.append(m[rows, third])
            sums.append(res.m_sum[rows])
    x, y, s = np.concatenate(xs), np.concatenate(ys), np.concatenate(sums)
    hi = bd.M_JK_STAR
    env = empirical_envelope(x, y, bins, (0.0, hi))
    full = (env.count >= LOCUS_MIN_COUNT) & (env.edges[1:] < hi)
    gap = np.abs(env.ymin[full] - bd.m_lower_boundary(env.centers[full]))
    # M sums of the per-bin minimisers
    inside = x < hi
    idx = np.clip((x[inside] / hi * bins).astype(int), 0, bins - 1)
    ymin = env.ymin[idx]
    at_min = y[inside] == ymin
    sum_at_min = s[inside][at_min]
    sum_at_min = sum_at_min[full[idx[at_min]]]
    check = Check("lower_locus", True, f"{int(full.sum())} bins of M_jk below m_jk*")
    _binned(check, gap, "binned min of M_ik vs m_lower_boundary")
    _binned(check, np.abs(sum_at_min - 2.0), "M sum of the minimisers vs 2")
    return check


def check_entropy_jump(res: ScanResult, width: float = 0.01) -> Check:
    """Largest E of violating pairs on both sides of C = 1/sqrt(2)."""
    c, e = res.measures["c"], res.measures["e"]
    below = res.violating & (c > bd.C_STAR - width) & (c <= bd.C_STAR)
    above = res.violating & (c > bd.C_STAR) & (c <= bd.C_STAR + width)
    if not below.any() or not above.any():
        return Check("entropy_jump", False, "no violating pairs next to C = 1/sqrt(2)")
    lo, hi = float(e[below].max()), float(e[above].max())
    ok = abs(lo - 1.0 / 3.0) <= ENVELOPE_GAP and abs(hi - bd.E_STAR) <= ENVELOPE_GAP
    return Check("entropy_jump", ok,
                 f"max violating E just below C = 1/sqrt(2): {lo:.4f} (1/3), just above: {hi:.4f} (e* = {bd.E_STAR:.4f})")


def check_pure_family() -> Check:
    ms = np.linspace(0.0, 1.0, GRID)
    probs = np.array([bd.pure_reduced_probs(m)[0] for m in ms])
    amps = np.sqrt(probs).astype(complex)
    closed = closed_form_measures(probs)
    mat = matrix_path_measures(reduced_densities(amps))
    dm = max(np.max(np.abs(closed["m"][:, 0] - (2 - ms))), np.max(np.abs(mat["m"][:, 0] - (2 - ms))))
    de = max(np.max(np.abs(closed["e"][:, 0])), np.max(np.abs(mat["e"][:, 0])))
    ok = dm <= INVARIANT_TOL and de <= DUALITY_TOL
    return Check("pure_reduced_family", bool(ok),
                 f"{GRID} values of m_jk: max |M12 - (2 - m_jk)| = {dm:.1e}, max |E12| = {de:.1e}")


def check_constants() -> Check:
    d1 = abs(bd.m_max_vs_entropy(bd.E_STAR) - 1.0)
    d2 = abs(bd.negativity_violation_lower(bd.C_STAR) - bd.N_TWO)
    d3 = abs(bd.verstraete_min_negativity(bd.C_STAR) - bd.N_ONE)
    ok = max(d1, d2, d3) <= 1e-12
    return Check("threshold_constants", ok,
                 f"|m_max(e*) - 1| = {d1:.1e}, |N_lower(c*) - N_II| = {d2:.1e}, |N_min(c*) - N_I| = {d3:.1e}")


def run_verification(n: int = DEFAULT_N, seed: int = 0, workers: int = 1,
                     cross_path_n: int = CROSS_PATH_N, duality_n: int = DUALITY_N) -> VerificationReport:
    report = VerificationReport(n=n, seed=seed)
    try:
        res = run_scan(n, seed, Sector.SINGLE, workers=workers)
    except (InvariantViolation, ConsistencyError) as exc:
        report.checks.append(Check("scan", False, str(exc), getattr(exc, "probs", None)))
        return report
    report.checks.append(Check("scan", True, f"{n} states, {res.audited} audited through the matrix path"))
    report.checks.append(check_cross_path(seed, min(n, cross_path_n)))
    report.checks += [
        check_like_monogamy(res),
        check_concurrence_threshold(res),
        check_entropy_threshold(res),
        check_m_entropy_envelope(res),
        check_werner_family(),
        check_pure_family(),
        check_verstraete(res),
        check_entropy_concurrence(res),
    ]
    branch, report.resolved_interval = check_branch_order(res)
    report.checks.append(branch)
    report.checks += [
        check_classifier("classifier_cn", bd.violation_region_cn(res.measures["c"], res.measures["n"]), res),
        check_classifier("classifier_ce", bd.violation_region_ce(res.measures["c"], res.measures["e"]), res),
        check_sector_duality(seed, min(n, duality_n), res),
        check_m_sum(res),
        check_lower_locus(res),
        check_entropy_jump(res),
        check_constants(),
    ]
    return report
