"""Command-line entry point: ``wclass-bell {measure,sample,boundary,figure,verify}``.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 invariant
counterexample (or closed-form/matrix-path disagreement), 4 I/O error.
Tables print 6 decimals; CSV output carries 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import boundaries as bd
from .errors import (
    ConsistencyError, ContractError, InvariantViolation, NumericalError, ValidationError,
)
from .measures import all_pairs
from .scan import DEFAULT_N, FIGURE_IDS, build_figure, default_workers, export_csv, run_scan, write_samples
from .states import PAIRS, Sector, make_state

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3, 4
FIGURE_DEFAULT_N = 100_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit 2; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_amps(text: str) -> list[complex]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValidationError(f"--amps needs three comma-separated amplitudes, got {len(parts)}")
    try:
        return [complex(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"cannot parse amplitude in {text!r}: use a+bj syntax") from exc


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _resolve_seed(seed):
    seed = secrets.randbits(64) if seed is None else seed
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wclass-bell", description="Bell nonlocality and entanglement of qubit pairs in W-class states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser, metavar="COMMAND")

    m = sub.add_parser("measure", help="M, C, N, E for every qubit pair of one state")
    m.add_argument("--amps", required=True, help="three amplitudes a+bj, comma separated")
    m.add_argument("--sector", choices=[s.value for s in Sector], default="single")
    m.add_argument("--strict", action="store_true", help="reject amplitudes that are not normalised")
    m.add_argument("--json", action="store_true")

    s = sub.add_parser("sample", help="Monte Carlo scan written as CSV")
    s.add_argument("--n", type=_positive, default=DEFAULT_N)
    s.add_argument("--seed", type=_u64, default=None, help="64-bit seed (random when omitted, always echoed)")
    s.add_argument("--sector", choices=[x.value for x in Sector], default="single")
    s.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    s.add_argument("--workers", type=_positive, default=None)

    b = sub.add_parser("boundary", help="tabulate an analytic boundary curve")
    b.add_argument("--curve", required=True, choices=sorted(bd.CURVES))
    b.add_argument("--from", dest="x0", type=float, default=None)
    b.add_argument("--to", dest="x1", type=float, default=None)
    b.add_argument("--steps", type=_positive, default=200, help="number of segments")
    b.add_argument("--out", default="-")

    f = sub.add_parser("figure", help="scatter dataset (CSV) and optional SVG for one region diagram")
    f.add_argument("--id", dest="figure_id", required=True, choices=list(FIGURE_IDS) + ["fig2"])
    f.add_argument("--n", type=_positive, default=FIGURE_DEFAULT_N)
    f.add_argument("--seed", type=_u64, default=None)
    f.add_argument("--sector", choices=[x.value for x in Sector], default="single")
    f.add_argument("--csv", required=True)
    f.add_argument("--svg", default=None)
    f.add_argument("--workers", type=_positive, default=None)

    v = sub.add_parser("verify", help="run the invariant suite over a seeded scan")
    v.add_argument("--n", type=_positive, default=DEFAULT_N)
    v.add_argument("--seed", type=_u64, default=None)
    v.add_argument("--json", action="store_true")
    v.add_argument("--workers", type=_positive, default=None)
    return p


def _cmd_measure(args) -> int:
    state = make_state(parse_amps(args.amps), args.sector, renormalize=not args.strict)
    pms = all_pairs(state)
    if args.json:
        out = {
            "amps": [[z.real, z.imag] for z in state.amps],
            "sector": state.sector.value,
            "pairs": {str(pair): {"M": pm.m, "C": pm.c, "N": pm.n, "E": pm.e, "violates": pm.violates}
                      for pair, pm in zip(PAIRS, pms)},
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"{'pair':<6}{'M':>10}{'C':>10}{'N':>10}{'E':>10}  violates")
    for pair, pm in zip(PAIRS, pms):
        print(f"{str(pair):<6}{pm.m:>10.6f}{pm.c:>10.6f}{pm.n:>10.6f}{pm.e:>10.6f}  {'yes' if pm.violates else 'no'}")
    return EXIT_OK


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline="", encoding="ascii"), True
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _cmd_sample(args) -> int:
    seed = _resolve_seed(args.seed)
    res = run_scan(args.n, seed, args.sector, workers=args.workers or default_workers())
    fh, close = _open_out(args.out)
    try:
        write_samples(res, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _cmd_boundary(args) -> int:
    curve = bd.CURVES[args.curve]
    x, y = curve.polyline(args.x0, args.x1, args.steps)
    fh, close = _open_out(args.out)
    try:
        fh.write("x,y\n")
        fh.writelines(f"{a:.17g},{b:.17g}\n" for a, b in zip(x.tolist(), np.asarray(y).tolist()))
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _cmd_figure(args) -> int:
    seed = _resolve_seed(args.seed)
    res = run_scan(args.n, seed, args.sector, workers=args.workers or default_workers())
    data = build_figure(res, args.figure_id)
    written = export_csv(data, args.csv)
    if args.svg:
        from .plotting import render_svg

        written.append(render_svg(data, args.svg))
    print(f"{data.figure_id}: {len(data)} points ({int(data.violating.sum())} violating), {len(data.curves)} curves")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_verification

    seed = _resolve_seed(args.seed)
    report = run_verification(args.n, seed, workers=args.workers or default_workers())
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for c in report.checks:
            line = f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}"
            if c.counterexample is not None:
                line += "  P = (" + ", ".join(f"{p:.17g}" for p in c.counterexample) + ")"
            print(line)
        if report.resolved_interval:
            lo, hi = report.resolved_interval
            print(f"resolved middle negativity interval: [{lo:.10f}, {hi:.10f}]")
    return EXIT_OK if report.passed else EXIT_INVARIANT


COMMANDS = {
    "measure": _cmd_measure,
    "sample": _cmd_sample,
    "boundary": _cmd_boundary,
    "figure": _cmd_figure,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except InvariantViolation as exc:
        msg = f"error: {exc}"
        if exc.probs is not None:
            msg += "  P = (" + ", ".join(f"{p:.17g}" for p in exc.probs) + ")"
        print(msg, file=sys.stderr)
        return EXIT_INVARIANT
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValidationError, ContractError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
