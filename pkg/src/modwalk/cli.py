"""Command-line entry point: ``modwalk <subcommand> [flags]``.

Exit status is 0 on success, 1 on invalid input and 2 when a size limit is hit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .cfrac import ExtendedRational, expand
from .chains import (
    WalkConfig,
    default_workers,
    sample_stationary_W,
    sample_stationary_X,
    sample_stationary_Y,
    simulate,
)
from .errors import DomainError, ModwalkError, ResourceLimitError
from .minkowski import DyadicRational, chi_half, lambda_survival, qmark, qmark_inverse, qmark_oracle
from .psl2z import UpperHalfPoint
from .stats import (
    EmpiricalDistribution,
    exact_distribution_W,
    exact_distribution_X,
    fourier_coefficients,
    ks_distance,
)
from .tiling import cayley_ball, reduce_to_fundamental

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2

_STATIONARY = {"stationary-W": sample_stationary_W, "stationary-Y": sample_stationary_Y, "stationary-X": sample_stationary_X}
_CHAINS = ["X", "Y", "Z", "V", "W", "U", *_STATIONARY]
_KS_DEFAULT_REF = {"W": "qmark", "U": "qmark", "Y": "chi-half-survival", "X": "lambda"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _rational(text: str) -> ExtendedRational:
    try:
        return ExtendedRational.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _coordinate(text: str):
    """A rational ("p/q" or integer) stays exact; anything else is read as a float."""
    try:
        if "/" in text:
            p, q = text.split("/")
            return Fraction(int(p), int(q))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed coordinate {text!r}") from None


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, UpperHalfPoint):
        return f"{_fmt(v.re)} {_fmt(v.im)}"
    return str(v)


def _point(re, im) -> UpperHalfPoint:
    if isinstance(re, float) or isinstance(im, float):
        return UpperHalfPoint(float(re), float(im))
    return UpperHalfPoint(re, im)


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _write_rows(args, header, rows) -> None:
    out, close = _open_out(args.output)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            out.close()


def _workers(args) -> int:
    return args.workers if args.workers is not None else default_workers()


def _start(args):
    chain = args.chain
    if chain in ("Z", "V"):
        if args.start_im is None:
            raise DomainError(f"chain {chain} needs --start-re and --start-im")
        re = args.start_re if args.start_re is not None else Fraction(0)
        pt = _point(re, args.start_im)
        if args.mode == "exact" and not pt.is_exact:
            raise DomainError("exact mode needs rational --start-re/--start-im")
        return pt
    if args.start_re is not None or args.start_im is not None:
        raise DomainError(f"chain {chain} lives on the boundary; use --start")
    if args.start is None:
        raise DomainError("--start is required")
    if args.mode == "float":
        return float(args.start)
    return args.start


def _stationary_values(args):
    cfg = WalkConfig(args.seed, 0, args.trajectories, args.mode)
    return _STATIONARY[args.chain](cfg, args.depth).values


def cmd_simulate(args) -> int:
    flags: dict = {}
    if args.chain in _STATIONARY:
        # one independent draw per trajectory, reported at step = depth
        trajs = [[v] for v in _stationary_values(args)]
        first_step = args.depth
    else:
        cfg = WalkConfig(args.seed, args.steps, args.trajectories, args.mode)
        res = simulate(args.chain, _start(args), cfg, _workers(args), path=not args.final_only)
        trajs, flags = res.trajectories, res.flags
        first_step = args.steps if args.final_only else 0
    for j, flag in sorted(flags.items()):
        print(f"trajectory {j}: {flag}", file=sys.stderr)
    if args.format == "json":
        doc = {
            "chain": args.chain,
            "seed": args.seed,
            "trajectories": [[_fmt(v) for v in t] for t in trajs],
            "flags": {str(j): f for j, f in sorted(flags.items())},
        }
        out, close = _open_out(args.output)
        try:
            out.write(json.dumps(doc) + "\n")
        finally:
            if close:
                out.close()
        return EXIT_OK
    rows = ((j, first_step + k, _fmt(v)) for j, t in enumerate(trajs) for k, v in enumerate(t))
    _write_rows(args, ["trajectory", "step", "value"], rows)
    return EXIT_OK


def _print_dyadic(d: DyadicRational) -> None:
    print(d.to_fraction())
    print(d)
    print(format(float(d), ".17g"))


def cmd_eval(args) -> int:
    x = args.x
    fn = args.fn
    if fn == "qmark":
        _print_dyadic(qmark(x))
    elif fn == "qmark-oracle":
        f = qmark_oracle(x)
        print(f)
        print(format(float(f), ".17g"))
    elif fn == "qmark-inverse":
        v = qmark_inverse(x.to_fraction())
        print(v)
        print(format(float(v), ".17g"))
    elif fn == "chi":
        _print_dyadic(chi_half(x))
    elif fn == "lambda-survival":
        _print_dyadic(lambda_survival(x))
    elif fn == "cf":
        print(expand(x))
    return EXIT_OK


def cmd_ks_test(args) -> int:
    base = args.chain.removeprefix("stationary-")
    if base not in _KS_DEFAULT_REF:
        raise DomainError(f"ks-test needs a boundary chain, not {args.chain}")
    ref = args.against or _KS_DEFAULT_REF[base]
    if args.chain in _STATIONARY:
        vals = _stationary_values(args)
    else:
        cfg = WalkConfig(args.seed, args.steps, args.trajectories, args.mode)
        res = simulate(args.chain, _start(args), cfg, _workers(args), path=False)
        vals = res.final()
    r = ks_distance(EmpiricalDistribution(vals), ref)
    ok = r.statistic <= args.threshold
    print(f"statistic {r.statistic:.17g}")
    print(f"samples {r.count}")
    print(f"reference {ref}")
    print(f"threshold {args.threshold:g}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK


def cmd_graph(args) -> int:
    g = cayley_ball(args.radius, args.max_vertices)
    text = g.to_dot() if args.format == "dot" else g.to_json() + "\n"
    out, close = _open_out(args.output)
    try:
        out.write(text)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_reduce(args) -> int:
    r = reduce_to_fundamental(_point(*args.point))
    print(f"tile {r.tile.label()}")
    print(f"point {_fmt(r.point)}")
    if r.ambiguous:
        print("boundary: ambiguous")
    return EXIT_OK


def cmd_fourier(args) -> int:
    cfg = WalkConfig(args.seed, 0, args.samples, "float")
    vals = sample_stationary_W(cfg, args.depth).values
    coeffs = fourier_coefficients(args.n_max, vals)
    _write_rows(
        args,
        ["n", "re", "im", "modulus"],
        ((n, _fmt(c.real), _fmt(c.imag), _fmt(abs(c))) for n, c in enumerate(coeffs)),
    )
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.chain == "W":
        dist = exact_distribution_W(args.start, args.steps)
    else:
        dist = exact_distribution_X(args.start, args.steps)
    _write_rows(args, ["value", "weight"], ((str(v), str(w)) for v, w in dist.support))
    return EXIT_OK


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_run_flags(p, default_steps: int = 64) -> None:
    p.add_argument("--chain", required=True, choices=_CHAINS)
    p.add_argument("--steps", type=_nonneg, default=default_steps)
    p.add_argument("--trajectories", type=_positive, default=1)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--start", type=_rational)
    p.add_argument("--start-re", type=_coordinate)
    p.add_argument("--start-im", type=_coordinate)
    p.add_argument("--mode", choices=["exact", "float"])
    p.add_argument("--depth", type=_positive, default=64, help="quotients per stationary-* draw")
    p.add_argument("--workers", type=_positive, help="worker processes (default: MODWALK_THREADS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="modwalk", description="Random walks on the modular group and the Minkowski ? function.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run seeded trajectories and write CSV (trajectory, step, value)")
    _add_run_flags(p)
    p.add_argument("--final-only", action="store_true")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", "--output", "-o", dest="output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="evaluate ? and related functions exactly")
    p.add_argument("--fn", required=True, choices=["qmark", "qmark-oracle", "qmark-inverse", "chi", "lambda-survival", "cf"])
    p.add_argument("--x", required=True, type=_rational)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ks-test", help="KS distance of simulated finals to a reference law")
    _add_run_flags(p)
    p.add_argument("--against", choices=["qmark", "chi-half-survival", "lambda"])
    p.add_argument("--threshold", type=float, default=0.01)
    p.set_defaults(func=cmd_ks_test)

    p = sub.add_parser("graph", help="export a ball of the tiling graph")
    p.add_argument("--radius", type=_nonneg, required=True)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--max-vertices", type=_positive, default=1_000_000)
    p.add_argument("--out", "--output", "-o", dest="output")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("reduce", help="reduce a point of H to the fundamental domain")
    p.add_argument("--point", nargs=2, required=True, type=_coordinate, metavar=("RE", "IM"))
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("fourier", help="Fourier coefficients of stationary ? samples as CSV")
    p.add_argument("--n-max", type=_nonneg, default=64)
    p.add_argument("--samples", type=_positive, default=1_000_000)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--depth", type=_positive, default=64)
    p.add_argument("--out", "--output", "-o", dest="output")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("enumerate", help="exact law of W_n or X_n as CSV (value, weight)")
    p.add_argument("--chain", required=True, choices=["W", "X"])
    p.add_argument("--start", required=True, type=_rational)
    p.add_argument("--steps", required=True, type=_nonneg)
    p.add_argument("--out", "--output", "-o", dest="output")
    p.set_defaults(func=cmd_enumerate)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"modwalk: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ModwalkError, ZeroDivisionError) as exc:
        print(f"modwalk: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
