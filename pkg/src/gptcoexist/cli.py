"""Command-line front end.

Exit codes: 0 success, 1 failed check or criterion/oracle disagreement,
2 invalid arguments, 3 theory construction failure, 4 closed-form criterion
not applicable (odd or non-polygon theory).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .coexistence import (
    OddPolygonError,
    OutsideUnbiasedPolygon,
    coexist_oracle,
    coexistence_region,
    criterion_verdict,
    ellipse_area,
    probe_agreement,
    quantum_limit_gap,
)
from .serialize import effects_csv, fmt, limit_csv, region_csv, theory_from_json, theory_to_json
from .theory import (
    Theory,
    build_classical_theory,
    build_displaced_hexagon,
    build_regular_polygon_theory,
    build_square_bit,
    is_effect,
)

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUILD = 3
EXIT_CRITERION = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _coords(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("coordinates must be finite")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", type=Path, help="write the primary output here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    return p


def _theory_source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--polygon", type=int, metavar="N")
    g.add_argument("--classical", type=int, metavar="N")
    g.add_argument("--square-bit", action="store_true")
    g.add_argument("--displaced-hexagon", type=float, metavar="DELTA")
    g.add_argument("--theory", type=Path, metavar="FILE")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gptcoexist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", parents=[common], help="build and serialize a theory")
    _theory_source(p)

    p = sub.add_parser("effects", parents=[common], help="list extremal effects as CSV")
    _theory_source(p)

    p = sub.add_parser("coexist", parents=[common], help="decide coexistence of two effects")
    _theory_source(p)
    p.add_argument("--e", type=_coords, required=True)
    p.add_argument("--f", type=_coords, required=True)
    p.add_argument("--method", choices=("criterion", "oracle", "both"), default=None)

    p = sub.add_parser("region", parents=[common], help="coexistence region of a fixed unbiased effect")
    p.add_argument("--polygon", type=int, metavar="N", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--e", type=_coords)
    g.add_argument("--edge-ratio", type=float, metavar="S")
    g.add_argument("--vertex-ratio", type=float, metavar="V")
    p.add_argument("--svg", type=Path, metavar="PATH", help="figure file (format from suffix, svg by default)")
    p.add_argument("--probe-grid", type=int, default=50)

    p = sub.add_parser("limit", parents=[common], help="area gap to the qubit ellipse as n grows")
    p.add_argument("--e", type=_coords, required=True)
    p.add_argument("--n-list", type=_int_list, default=[8, 16, 32, 64, 128])
    p.add_argument("--plot", type=Path, metavar="PATH", help="write a gap-vs-n figure")

    p = sub.add_parser("verify", parents=[common], help="run the reproduction checks")
    p.add_argument("--only", type=lambda s: s.split(","), default=None)
    p.add_argument("--samples", type=int, default=10_000)
    return parser


def load_theory(args) -> Theory:
    try:
        if args.polygon is not None:
            return build_regular_polygon_theory(args.polygon)
        if args.classical is not None:
            return build_classical_theory(args.classical)
        if args.square_bit:
            return build_square_bit()
        if args.displaced_hexagon is not None:
            return build_displaced_hexagon(args.displaced_hexagon)
        return theory_from_json(Path(args.theory).read_text())
    except (ValueError, OSError, KeyError) as exc:
        raise CliError(f"cannot build theory: {exc}", EXIT_BUILD)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _vec(v) -> list[float]:
    return [float(fmt(c)) for c in v]


def cmd_theory(args) -> int:
    t = load_theory(args)
    doc = theory_to_json(t)
    hp = t.reflecting_hyperplane
    hp_text = "none" if hp is None else f"normal={_vec(hp.normal)} offset={fmt(hp.offset)}"
    summary = f"{t.name}: d={t.d}, {len(t.extremal_effects)} extremal effects, reflecting hyperplane {hp_text}\n"
    if args.out is None:
        sys.stdout.write(doc)
        sys.stderr.write(summary)
    else:
        Path(args.out).write_text(doc)
        sys.stdout.write(summary)
    return 0


def cmd_effects(args) -> int:
    _emit(effects_csv(load_theory(args)), args.out)
    return 0


def _effect_arg(t: Theory, coords, label: str) -> np.ndarray:
    v = np.asarray(coords, dtype=float)
    if len(v) == 2 and t.d == 3:
        v = np.array([v[0], v[1], 0.5])
    if v.shape != (t.d,):
        raise CliError(f"--{label} needs {t.d} coordinates (or 2 for an unbiased planar effect)", EXIT_USAGE)
    return v


def cmd_coexist(args) -> int:
    t = load_theory(args)
    e = _effect_arg(t, args.e, "e")
    f = _effect_arg(t, args.f, "f")
    for label, v in (("e", e), ("f", f)):
        if not is_effect(t, v, args.tol):
            raise CliError(f"--{label} is not an effect of {t.name}", EXIT_USAGE)
    n = (t.presentation or {}).get("polygon_n")
    method = args.method or ("both" if n is not None and n % 2 == 0 else "oracle")
    doc: dict = {"theory": t.name, "method": method}

    crit = None
    if method in ("criterion", "both"):
        if n is None:
            raise CliError("the closed-form criterion needs a polygon theory", EXIT_CRITERION)
        if abs(e[2] - 0.5) > args.tol or abs(f[2] - 0.5) > args.tol:
            raise CliError("the closed-form criterion applies to unbiased effects (z = 1/2)", EXIT_USAGE)
        try:
            crit = criterion_verdict(n, e[:2], f[:2])
        except OddPolygonError as exc:
            raise CliError(str(exc), EXIT_CRITERION)
        except OutsideUnbiasedPolygon as exc:
            raise CliError(str(exc), EXIT_USAGE)
        doc["slack"] = crit.slack
        doc["binding"] = crit.binding
    oracle = None
    if method in ("oracle", "both"):
        oracle = coexist_oracle(t, e, f)
        if oracle.witness is not None:
            doc["witness"] = {f"g{i + 1}": _vec(g) for i, g in enumerate(oracle.witness)}

    code = 0
    if method == "both":
        agree = crit.coexistent == oracle.coexistent
        doc["agreement"] = agree
        in_band = abs(crit.slack) <= 1e-6
        if not agree and not in_band:
            code = EXIT_FAIL
    coexistent = oracle.coexistent if oracle is not None else crit.coexistent
    doc = {"coexistent": coexistent, **doc}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return code


def _region_effect(args) -> tuple[float, float]:
    n = args.polygon
    if args.e is not None:
        if len(args.e) != 2:
            raise CliError("--e takes two planar coordinates", EXIT_USAGE)
        return args.e
    if args.edge_ratio is not None:
        return (0.5 * args.edge_ratio, 0.0)
    r = 0.5 / math.cos(math.pi / n) * args.vertex_ratio
    return (r * math.cos(math.pi / n), r * math.sin(math.pi / n))


def cmd_region(args) -> int:
    if args.polygon < 4:
        raise CliError("region needs an even polygon with n >= 4", EXIT_CRITERION if args.polygon % 2 else EXIT_USAGE)
    e = _region_effect(args)
    try:
        report = coexistence_region(args.polygon, e)
    except OddPolygonError as exc:
        raise CliError(str(exc), EXIT_CRITERION)
    except OutsideUnbiasedPolygon as exc:
        raise CliError(str(exc), EXIT_USAGE)
    probe = probe_agreement(report, args.probe_grid)
    _emit(region_csv(report, "criterion-halfplanes", probe), args.out)
    if args.svg is not None:
        from .plotting import save_region_figure

        save_region_figure(report, args.svg)
    return 0


def cmd_limit(args) -> int:
    if len(args.e) != 2:
        raise CliError("--e takes two planar coordinates", EXIT_USAGE)
    if not math.hypot(*args.e) < 0.5:
        raise CliError("--e must lie strictly inside the radius-1/2 disk", EXIT_USAGE)
    rows = []
    for n in args.n_list:
        if n < 4 or n % 2:
            raise CliError(f"--n-list entries must be even and >= 4, got {n}", EXIT_USAGE)
        area = coexistence_region(n, args.e).area
        rows.append((n, area, ellipse_area(args.e), quantum_limit_gap(n, args.e)))
    _emit(limit_csv(args.e, rows), args.out)
    if args.plot is not None:
        from .plotting import save_limit_figure

        save_limit_figure(rows, args.plot)
    return 0


def cmd_verify(args) -> int:
    from .verify import CHECKS, VerifyConfig, run_checks

    if args.only:
        unknown = [n for n in args.only if n not in CHECKS]
        if unknown:
            raise CliError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}", EXIT_USAGE)
    if args.samples < 1000:
        raise CliError("--samples must be at least 1000", EXIT_USAGE)
    results = run_checks(args.only, VerifyConfig(seed=args.seed, samples=args.samples))
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.summary}" for r in results]
    summary = {"passed": all(r.passed for r in results),
               "checks": {r.name: r.passed for r in results},
               "seed": args.seed, "samples": args.samples}
    lines.append(json.dumps(summary, sort_keys=True))
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if summary["passed"] else EXIT_FAIL


COMMANDS = {
    "theory": cmd_theory,
    "effects": cmd_effects,
    "coexist": cmd_coexist,
    "region": cmd_region,
    "limit": cmd_limit,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        sys.stderr.write(f"gptcoexist: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
