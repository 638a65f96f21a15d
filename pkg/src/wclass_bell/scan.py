"""Monte Carlo scan over random W-class states, figure datasets and CSV export.

The scan is columnar: :class:`ScanResult` keeps ``(n, 3)`` arrays of the four
measures (columns = pairs 12, 13, 23) instead of one Python object per state.
:meth:`ScanResult.records` yields :class:`SampleRecord` rows on demand.

Work is split into fixed-size chunks, each with its own derived seed, so the
output does not depend on how many worker processes run them.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from . import boundaries as bd
from .errors import ConsistencyError, InvariantViolation, ValidationError
from .measures import CROSS_PATH_TOL, VIOLATION_TOL, PairMeasures, closed_form_measures, matrix_path_measures
from .states import CHUNK_SIZE, PAIRS, PairId, Probabilities, Sector, chunk_bounds, reduced_densities, sample_chunk

DEFAULT_N = 1_000_000
DEFAULT_AUDIT_FRACTION = 1e-3
KEYS = ("m", "c", "n", "e")


@dataclass(frozen=True)
class SampleRecord:
    index: int
    probs: Probabilities
    measures: tuple[PairMeasures, PairMeasures, PairMeasures]
    violating_pair: PairId | None
    m_sum: float


@dataclass
class ScanResult:
    seed: int
    sector: Sector
    probs: np.ndarray
    measures: dict[str, np.ndarray]
    audited: int = 0

    def __len__(self) -> int:
        return self.probs.shape[0]

    @classmethod
    def from_probabilities(cls, probs, seed: int = 0, sector=Sector.SINGLE) -> "ScanResult":
        """Wrap given probability triples, e.g. hand-picked states, as a scan."""
        probs = np.atleast_2d(np.asarray(probs, dtype=float))
        if probs.ndim != 2 or probs.shape[1] != 3:
            raise ValidationError(f"expected (n, 3) probabilities, got shape {probs.shape}")
        for row in probs:
            Probabilities(*row)
        return cls(seed, Sector(sector), probs, closed_form_measures(probs))

    @property
    def violating(self) -> np.ndarray:
        """Boolean ``(n, 3)``: pair violates the Bell-CHSH inequality."""
        return self.measures["m"] > 1.0 + VIOLATION_TOL

    @property
    def violating_pair(self) -> np.ndarray:
        """Index into ``PAIRS`` of the violating pair, or -1."""
        v = self.violating
        return np.where(v.any(axis=1), np.argmax(v, axis=1), -1)

    @property
    def m_sum(self) -> np.ndarray:
        return self.measures["m"].sum(axis=1)

    def records(self) -> Iterator[SampleRecord]:
        vp = self.violating_pair
        msum = self.m_sum
        for i in range(len(self)):
            pm = tuple(PairMeasures(*(float(self.measures[k][i, j]) for k in KEYS)) for j in range(3))
            yield SampleRecord(
                index=i,
                probs=Probabilities(*(float(x) for x in self.probs[i])),
                measures=pm,
                violating_pair=PAIRS[vp[i]] if vp[i] >= 0 else None,
                m_sum=float(msum[i]),
            )


def _audit_stride(fraction: float) -> int:
    if fraction <= 0:
        return 0
    return max(1, int(round(1.0 / fraction)))


def _scan_chunk(args):
    seed, chunk, start, stop, sector, stride = args
    amps = sample_chunk(seed, chunk, stop - start)
    probs = np.abs(amps) ** 2
    meas = closed_form_measures(probs)

    n_viol = np.sum(meas["m"] > 1.0 + VIOLATION_TOL, axis=1)
    if np.any(n_viol > 1):
        i = int(np.argmax(n_viol > 1))
        raise InvariantViolation(
            f"state {start + i} violates the inequality on more than one pair", tuple(probs[i])
        )

    audited = 0
    if stride:
        idx = np.arange(start, stop)
        pick = np.nonzero(idx % stride == 0)[0]
        if pick.size:
            mat = matrix_path_measures(reduced_densities(amps[pick], sector))
            for k in KEYS:
                diff = np.abs(mat[k] - meas[k][pick])
                if np.any(diff > CROSS_PATH_TOL):
                    bad = int(np.argmax(diff.max(axis=1)))
                    raise ConsistencyError(
                        f"{k.upper()} closed form and matrix path differ by {diff.max():.3e} "
                        f"at P = {tuple(probs[pick[bad]])}"
                    )
            audited = int(pick.size)
    return probs, meas, audited


def run_scan(
    n: int = DEFAULT_N,
    seed: int = 0,
    sector=Sector.SINGLE,
    *,
    audit_fraction: float = DEFAULT_AUDIT_FRACTION,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> ScanResult:
    """Sample ``n`` states and compute closed-form measures for every pair.

    A deterministic subset (every ``round(1/audit_fraction)``-th state) is
    recomputed through the density-matrix path.  Raises
    :class:`InvariantViolation` when a state has two violating pairs and
    :class:`ConsistencyError` when an audited state disagrees between paths.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    sector = Sector(sector)
    stride = _audit_stride(audit_fraction)
    jobs = [(seed, c, start, stop, sector, stride) for c, start, stop in chunk_bounds(n, chunk_size)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_scan_chunk, jobs))
    else:
        parts = [_scan_chunk(job) for job in jobs]
    probs = np.concatenate([p[0] for p in parts])
    meas = {k: np.concatenate([p[1][k] for p in parts]) for k in KEYS}
    return ScanResult(seed=seed, sector=sector, probs=probs, measures=meas,
                      audited=sum(p[2] for p in parts))


def default_workers() -> int:
    return os.cpu_count() or 1


# -- envelopes ---------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    edges: np.ndarray
    count: np.ndarray
    ymin: np.ndarray
    ymax: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def rows(self):
        """``(center, ymin, ymax, count)`` for occupied bins only."""
        for c, lo, hi, k in zip(self.centers, self.ymin, self.ymax, self.count):
            if k:
                yield float(c), float(lo), float(hi), int(k)


def empirical_envelope(x, y, bins: int = 200, x_range=None) -> Envelope:
    """Per-bin minimum and maximum of ``y`` over equal-width bins of ``x``.

    Empty bins hold NaN extremes.  Points outside ``x_range`` are dropped.
    """
    if bins < 10:
        raise ValidationError(f"bins must be >= 10, got {bins}")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x_range is None:
        x_range = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    lo, hi = x_range
    if not hi > lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    keep = (x >= lo) & (x <= hi)
    x, y = x[keep], y[keep]
    idx = np.clip(((x - lo) / (hi - lo) * bins).astype(int), 0, bins - 1)
    count = np.bincount(idx, minlength=bins)
    ymin = np.full(bins, np.inf)
    ymax = np.full(bins, -np.inf)
    np.minimum.at(ymin, idx, y)
    np.maximum.at(ymax, idx, y)
    empty = count == 0
    ymin[empty] = np.nan
    ymax[empty] = np.nan
    return Envelope(edges, count, ymin, ymax)


# -- figure datasets -----------------------------------------------------------

FIGURE_IDS = ("fig1", "fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6")

# (x pair, y pair) column indices into PAIRS for the nonlocality-vs-nonlocality panels
_ALL_ORDERED = [(a, b) for b in range(3) for a in range(3) if a != b]
_SHARE_SECOND = [(2, 0), (2, 1), (1, 2)]  # y = ij against x = jk
_SHARE_FIRST = [(1, 0), (0, 1), (0, 2)]   # y = ij against x = ik


@dataclass
class CurveLine:
    name: str
    x: np.ndarray
    y: np.ndarray
    style: str = "solid"


@dataclass
class FigureDataset:
    figure_id: str
    x: np.ndarray
    y: np.ndarray
    violating: np.ndarray
    x_label: str
    y_label: str
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    curves: list[CurveLine] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return np.where(self.violating, "violating", "fulfilling")


def _curve(name, x0=None, x1=None, steps=400) -> CurveLine:
    c = bd.CURVES[name]
    x, y = c.polyline(x0, x1, steps)
    return CurveLine(name, x, y, c.style)


def _segment(name, x, y0, y1, style="dot-dashed") -> CurveLine:
    return CurveLine(name, np.array([x, x]), np.array([y0, y1]), style)


def _pairings(result: ScanResult, combos, rows):
    m = result.measures["m"][rows]
    xs = np.concatenate([m[:, a] for a, _ in combos])
    ys = np.concatenate([m[:, b] for _, b in combos])
    return xs, ys


def build_figure(result: ScanResult, figure_id: str) -> FigureDataset:
    """Project a scan onto the axes of one of the region diagrams.

    ``fig1``/``fig2a``/``fig2b`` plot one nonlocality parameter against
    another; ``fig3``..``fig6`` plot one point per qubit pair.  ``fig2`` is an
    alias for ``fig2a``.
    """
    if figure_id == "fig2":
        figure_id = "fig2a"
    if figure_id not in FIGURE_IDS:
        raise ValidationError(f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    if len(result) == 0:
        raise ValidationError("cannot build a figure from an empty scan")

    meta = {"n_states": len(result), "seed": result.seed, "sector": result.sector.value}
    state_viol = result.violating.any(axis=1)
    pair_viol = result.violating.ravel()
    meas = {k: v.ravel() for k, v in result.measures.items()}

    if figure_id in ("fig1", "fig2a", "fig2b"):
        if figure_id == "fig1":
            rows = np.arange(len(result))
            combos = _ALL_ORDERED
            meta["pairing"] = "all ordered pairs (M_p, M_q), p != q"
        else:
            rows = np.nonzero(state_viol)[0]
            combos = _SHARE_SECOND if figure_id == "fig2a" else _SHARE_FIRST
            meta["pairing"] = ("y = M_ij against x = M_jk (shared second label)" if figure_id == "fig2a"
                               else "y = M_ij against x = M_ik (shared first label)")
        meta["combos"] = [f"{PAIRS[b]} vs {PAIRS[a]}" for a, b in combos]
        xs, ys = _pairings(result, combos, rows)
        viol = np.tile(state_viol[rows], len(combos))
        return FigureDataset(
            figure_id, xs, ys, viol, "M_jk", "M_ij", (0.0, 2.0), (0.0, 2.0),
            [_curve("m_complement"), _curve("m_lower_boundary")], meta,
        )
    if figure_id == "fig3":
        curves = [
            _curve("negativity_violation_lower"),
            _segment("c_star_segment", bd.C_STAR, bd.N_ONE, bd.N_TWO),
            _curve("verstraete_min_negativity"),
            _curve("negativity_max"),
        ]
        return FigureDataset(figure_id, meas["c"], meas["n"], pair_viol, "C_ij", "N_ij",
                             (0.0, 1.0), (0.0, 1.0), curves, meta)
    if figure_id == "fig4":
        curves = [
            _curve("entropy_violation_low"),
            _segment("c_star_segment", bd.C_STAR, 1.0 / 3.0, bd.E_STAR),
            _curve("entropy_max_vs_concurrence"),
        ]
        return FigureDataset(figure_id, meas["c"], meas["e"], pair_viol, "C_ij", "E_ij",
                             (0.0, 1.0), (0.0, 1.0), curves, meta)
    if figure_id == "fig5":
        curves = [
            _curve("entropy_at_unit_m", 0.0, bd.N_TWO),
            _curve("entropy_at_c_star"),
            _curve("entropy_upper_vs_negativity"),
        ]
        return FigureDataset(figure_id, meas["n"], meas["e"], pair_viol, "N_ij", "E_ij",
                             (0.0, 1.0), (0.0, 1.0), curves, meta)
    # fig6: violating pairs only
    keep = pair_viol
    return FigureDataset(figure_id, meas["e"][keep], meas["m"][keep], pair_viol[keep], "E_ij", "M_ij",
                         (0.0, 2.0 / 3.0), (0.0, 2.0), [_curve("m_max_vs_entropy")], meta)


# -- CSV export ------------------------------------------------------------------

def _fmt(x) -> str:
    return "%.17g" % x


def _open(path):
    path = Path(path)
    try:
        return path.open("w", newline="", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


SAMPLE_COLUMNS = ["index", "p_a", "p_b", "p_c"] + [
    f"{k.upper()}{pair}" for pair in PAIRS for k in KEYS
] + ["violating_pair", "m_sum"]


def _sample_lines(result: ScanResult) -> Iterator[str]:
    yield ",".join(SAMPLE_COLUMNS) + "\n"
    cols = [result.probs[:, 0], result.probs[:, 1], result.probs[:, 2]]
    for j in range(3):
        cols.extend(result.measures[k][:, j] for k in KEYS)
    cols.append(result.m_sum)
    text_cols = [[_fmt(v) for v in c.tolist()] for c in cols]
    vp = result.violating_pair
    pair_names = ["" if v < 0 else str(PAIRS[v]) for v in vp.tolist()]
    for i in range(len(result)):
        row = [str(i)] + [c[i] for c in text_cols[:-1]] + [pair_names[i], text_cols[-1][i]]
        yield ",".join(row) + "\n"


def write_samples(result: ScanResult, stream) -> None:
    stream.writelines(_sample_lines(result))


def export_csv(data, path) -> list[Path]:
    """Write a scan or a figure dataset; returns every file written.

    Figure datasets produce ``path`` with columns ``x,y,region`` plus one
    ``<stem>.<curve>.csv`` polyline file per attached curve.
    """
    path = Path(path)
    if isinstance(data, ScanResult):
        with _open(path) as fh:
            write_samples(data, fh)
        return [path]
    if isinstance(data, FigureDataset):
        written = [path]
        with _open(path) as fh:
            fh.write("x,y,region\n")
            labels = data.labels
            fh.writelines(
                f"{x:.17g},{y:.17g},{lab}\n" for x, y, lab in zip(data.x.tolist(), data.y.tolist(), labels.tolist())
            )
        stem = path.with_suffix("") if path.suffix == ".csv" else path
        for curve in data.curves:
            cpath = stem.with_name(f"{stem.name}.{curve.name}.csv")
            with _open(cpath) as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["x", "y"])
                w.writerows((_fmt(a), _fmt(b)) for a, b in zip(curve.x, curve.y))
            written.append(cpath)
        return written
    raise TypeError(f"cannot export {type(data).__name__}")
