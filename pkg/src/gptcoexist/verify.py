"""Reproducibility checks behind the ``verify`` subcommand.

Each check returns a :class:`CheckResult`; ``run_checks`` drives them for the
``verify`` subcommand and for the acceptance tests.  Report text contains no
timings so that repeated runs are byte-identical; runtime limits are folded
into the pass/fail flag instead.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .coexistence import (
    coexist_oracle,
    coexistence_region,
    coexistence_volume_fraction,
    criterion_verdict,
    ellipse_area,
    in_extremal_coexistence_set,
    lower_set_slice,
    probe_agreement,
    quantum_limit_gap,
    sample_effect,
    sample_rng,
    unbiased,
    verdict_is_valid,
)
from .geometry import DEDUP_TOL
from .theory import (
    build_classical_theory,
    build_displaced_hexagon,
    build_regular_polygon_theory,
    build_square_bit,
    effect_complement,
    find_reflecting_hyperplane,
    is_edge,
    is_effect,
    is_state_space_point_symmetric,
    square_bit_probability_table,
    closed_form_extremal_effects,
)

# Published square-bit probabilities, columns o, e1..e4, u.
SQUARE_BIT_TABLE = np.array([
    [0, 1, 0, 0, 1, 1],
    [0, 1, 0, 1, 0, 1],
    [0, 0, 1, 0, 1, 1],
    [0, 0, 1, 1, 0, 1],
], dtype=float)

EVEN_NS = (4, 6, 8, 10, 12)
DISPLACEMENTS = (0.1, 0.25, 0.4)


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    samples: int = 10_000


def _set_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric max-min distance between two point sets (coordinatewise max norm)."""
    d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def check_extremal_table(cfg: VerifyConfig) -> CheckResult:
    start = time.perf_counter()
    worst = 0.0
    counts = {}
    ok = True
    for n in range(3, 13):
        t = build_regular_polygon_theory(n)
        ref = closed_form_extremal_effects(n)
        expected = 2 * n + 2 if n % 2 else n + 2
        counts[n] = len(t.extremal_effects)
        err = _set_distance(t.extremal_effects, ref)
        worst = max(worst, err)
        ok &= len(t.extremal_effects) == expected == len(ref) and err < 1e-9
    fast = time.perf_counter() - start < 5.0
    return CheckResult("extremal_table", bool(ok and fast),
                       f"n=3..12 extremal counts {list(counts.values())}, max coordinate error {'<1e-9' if worst < 1e-9 else f'{worst:.3g}'}"
                       + ("" if fast else ", runtime over 5 s"),
                       {"counts": counts, "max_error_below_1e-9": worst < 1e-9, "within_time": fast})


def check_square_bit_table(cfg: VerifyConfig) -> CheckResult:
    table = square_bit_probability_table(build_square_bit())
    err = float(np.abs(table - SQUARE_BIT_TABLE).max())
    return CheckResult("square_bit_table", err <= 1e-12, f"square-bit 4x6 table max deviation {err:.1e}", {"max_error": err})


def criterion_sample_points(n: int, seed: int, count: int = 21) -> np.ndarray:
    """Center, the ``k = 0`` vertex, the ``k = 0`` edge midpoint, then seeded interior points."""
    vertex = np.array([math.cos(math.pi / n), math.sin(math.pi / n)]) * 0.5 / math.cos(math.pi / n)
    pts = [np.zeros(2), vertex, np.array([0.5, 0.0])]
    rng = np.random.default_rng([seed, n])
    S = np.column_stack([np.cos(2 * np.pi * np.arange(n) / n), np.sin(2 * np.pi * np.arange(n) / n)])
    r = 0.5 / math.cos(math.pi / n)
    while len(pts) < count:
        p = rng.uniform(-r, r, 2)
        if np.max(S @ p) <= 0.5:
            pts.append(p)
    return np.array(pts)


def criterion_oracle_agreement(n: int, seed: int) -> dict:
    t = build_regular_polygon_theory(n)
    pts = criterion_sample_points(n, seed)
    agree = disagree = band = 0
    bad_witness = 0
    for e in pts:
        for f in pts:
            crit = criterion_verdict(n, e, f)
            if abs(crit.slack) <= 1e-6:
                band += 1
                continue
            v = coexist_oracle(t, unbiased(e), unbiased(f))
            if v.coexistent and not verdict_is_valid(t, v, unbiased(e), unbiased(f)):
                bad_witness += 1
            if v.coexistent == crit.coexistent:
                agree += 1
            else:
                disagree += 1
    return {"agree": agree, "disagree": disagree, "boundary_band": band, "bad_witness": bad_witness}


def check_criterion_oracle(cfg: VerifyConfig) -> CheckResult:
    start = time.perf_counter()
    per_n = {n: criterion_oracle_agreement(n, cfg.seed) for n in (4, 6, 8, 10)}
    fast = time.perf_counter() - start < 60.0
    ok = all(r["disagree"] == 0 and r["bad_witness"] == 0 for r in per_n.values()) and fast
    text = "; ".join(f"n={n}: {r['agree']} agree, {r['disagree']} disagree, {r['boundary_band']} in band"
                     for n, r in per_n.items())
    return CheckResult("criterion_oracle", ok, text + ("" if fast else "; runtime over 60 s"), per_n)


def check_vanishing(cfg: VerifyConfig) -> CheckResult:
    areas = {}
    fractions = {}
    for n in EVEN_NS:
        t = build_regular_polygon_theory(n)
        nontrivial = t.nontrivial_effects()
        areas[n] = max(coexistence_region(n, e[:2]).area for e in nontrivial)
        fractions[f"polygon-{n}"] = coexistence_volume_fraction(t, closed_form_extremal_effects(n)[1], cfg.samples, cfg.seed)
    for delta in DISPLACEMENTS:
        h = build_displaced_hexagon(delta)
        fractions[f"displaced-{delta:g}"] = coexistence_volume_fraction(h, h.extremal_effects[1], cfg.samples, cfg.seed)
    ok = all(a < 1e-12 for a in areas.values()) and all(f < 0.01 for f in fractions.values())
    text = (f"max extremal region area {max(areas.values()):.1e}; "
            + ", ".join(f"{k}: {v:.4f}" for k, v in fractions.items()))
    return CheckResult("vanishing", ok, text, {"areas": areas, "fractions": fractions, "samples": cfg.samples})


def parallelogram_samples(t, e, seed: int, count: int = 200) -> list[np.ndarray]:
    """Mixture of uniform effects, points inside ``conv{o, e, u-e, u}``, and
    parallelogram points pushed off its plane.

    For extremal ``e`` the plane meets the effect space only in the
    parallelogram, so near misses have to leave the plane.
    """
    ebar = effect_complement(t, e)
    normal = np.cross(e, ebar)
    normal /= np.linalg.norm(normal)
    out = []
    i = 0
    while len(out) < count:
        if i > 1000 * count:
            raise RuntimeError("parallelogram sampling made no progress")
        rng = sample_rng(seed, i)
        kind = len(out) % 3
        i += 1
        if kind == 0:
            out.append(sample_effect(t, rng))
            continue
        s, r = rng.uniform(0.0, 1.0, 2)
        f = s * e + r * ebar
        if kind == 2:
            f = f + rng.choice([-1.0, 1.0]) * rng.uniform(0.005, 0.1) * normal
        if is_effect(t, f, 0.0):
            out.append(f)
    return out


def check_parallelogram(cfg: VerifyConfig) -> CheckResult:
    t = build_regular_polygon_theory(6)
    e = closed_form_extremal_effects(6)[1]
    samples = parallelogram_samples(t, e, cfg.seed)
    agree = members = 0
    for f in samples:
        member = in_extremal_coexistence_set(t, e, f)
        members += member
        agree += member == coexist_oracle(t, e, f).coexistent
    return CheckResult("parallelogram", agree == len(samples),
                       f"n=6 extremal e: {agree}/{len(samples)} agree ({members} members)",
                       {"agree": agree, "total": len(samples), "members": members})


def check_hyperplane_symmetry(cfg: VerifyConfig) -> CheckResult:
    rows = {}
    ok = True
    for n in range(3, 13):
        t = build_regular_polygon_theory(n)
        hp = find_reflecting_hyperplane(t)
        sym = is_state_space_point_symmetric(t)
        want = n % 2 == 0
        good = (hp is not None) == want == sym and (hp is None or hp.residual < 1e-9)
        rows[f"polygon-{n}"] = {"hyperplane": hp is not None, "point_symmetric": sym}
        ok &= good
    for delta in DISPLACEMENTS:
        hp = build_displaced_hexagon(delta).reflecting_hyperplane
        rows[f"displaced-{delta:g}"] = {"hyperplane": hp is not None}
        ok &= hp is None
    found = [k for k, v in rows.items() if v["hyperplane"]]
    return CheckResult("hyperplane_symmetry", ok, f"hyperplane found for {', '.join(found)}; none elsewhere", rows)


def check_quantum_limit(cfg: VerifyConfig) -> CheckResult:
    e = (0.2, 0.0)
    ns = (8, 16, 32, 64, 128)
    gaps = [quantum_limit_gap(n, e) for n in ns]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    g200 = quantum_limit_gap(200, e)
    center_err = max(abs(quantum_limit_gap(n, (0.0, 0.0)) - (n * math.tan(math.pi / n) / math.pi - 1))
                     for n in (4, 6, 8, 16, 64, 200))
    ok = decreasing and g200 < 0.01 and center_err < 1e-9
    text = ("gaps " + ", ".join(f"{n}:{g:.5f}" for n, g in zip(ns, gaps))
            + f"; n=200: {g200:.6f}; center closed form {'matches' if center_err < 1e-9 else 'differs'}")
    return CheckResult("quantum_limit", ok, text,
                       {"gaps": dict(zip(ns, gaps)), "gap_200": g200, "center_within_1e-9": center_err < 1e-9})


def check_classical(cfg: VerifyConfig) -> CheckResult:
    t = build_classical_theory(2)
    coexist = witness_ok = 0
    for i in range(500):
        rng = sample_rng(cfg.seed, i)
        e, f = rng.uniform(0, 1, 2), rng.uniform(0, 1, 2)
        coexist += coexist_oracle(t, e, f).coexistent
        g1 = np.minimum(e, f)
        g2, g3 = e - g1, f - g1
        g4 = t.unit - g1 - g2 - g3
        witness_ok += all(is_effect(t, g) for g in (g1, g2, g3, g4))
    ok = coexist == 500 and witness_ok == 500
    return CheckResult("classical", ok, f"classical bit: {coexist}/500 coexistent, {witness_ok}/500 min-witnesses valid",
                       {"coexistent": coexist, "witness_valid": witness_ok})


def _all_theories():
    for n in range(3, 13):
        yield build_regular_polygon_theory(n)
    for n in (2, 3, 4):
        yield build_classical_theory(n)
    yield build_square_bit()
    for delta in DISPLACEMENTS:
        yield build_displaced_hexagon(delta)


def check_edges(cfg: VerifyConfig) -> CheckResult:
    edge_fail = slice_fail = 0
    checked = 0
    for n in EVEN_NS:
        t = build_regular_polygon_theory(n)
        for e in t.nontrivial_effects():
            checked += 1
            edge_fail += not (is_edge(t, t.zero, e) and is_edge(t, e, t.unit))
            for l in (0.1, 0.25, 0.4):
                sl = lower_set_slice(t, e, l).vertices
                point = 2 * l * e[:2]
                slice_fail += not (len(sl) == 1 and np.abs(sl[0] - point).max() <= DEDUP_TOL)
    closure_fail = []
    for t in _all_theories():
        X = t.extremal_effects
        comp = t.unit - X
        if _set_distance(comp, X) > 1e-9:
            closure_fail.append(t.name)
    ok = edge_fail == 0 and slice_fail == 0 and not closure_fail
    text = (f"{checked} nontrivial extremals: {edge_fail} edge failures, {slice_fail} slice failures; "
            f"complement closure {'holds for all theories' if not closure_fail else 'fails: ' + ', '.join(closure_fail)}")
    return CheckResult("edges", ok, text, {"edge_failures": edge_fail, "slice_failures": slice_fail,
                                            "closure_failures": closure_fail})


def check_determinism(cfg: VerifyConfig) -> CheckResult:
    import tempfile
    from pathlib import Path

    from .plotting import save_region_figure
    from .serialize import limit_csv, region_csv

    def outputs():
        rep = coexistence_region(6, (1 / 3 * 0.5, 0.0))
        csv = region_csv(rep, "criterion", probe_agreement(rep, 20))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "r.svg"
            save_region_figure(rep, path)
            svg = path.read_bytes()
        rows = [(n, coexistence_region(n, (0.2, 0.0)).area, ellipse_area((0.2, 0.0)), quantum_limit_gap(n, (0.2, 0.0)))
                for n in (8, 16)]
        frac = coexistence_volume_fraction(build_regular_polygon_theory(6), unbiased((0.1, 0.05)), 1000, cfg.seed)
        return csv.encode(), svg, limit_csv((0.2, 0.0), rows).encode(), repr(frac).encode()

    first, second = outputs(), outputs()
    same = [a == b for a, b in zip(first, second)]
    names = ("region_csv", "region_svg", "limit_csv", "monte_carlo")
    return CheckResult("determinism", all(same),
                       ", ".join(f"{k} {'identical' if s else 'differs'}" for k, s in zip(names, same)),
                       dict(zip(names, same)))


CHECKS: dict[str, Callable[[VerifyConfig], CheckResult]] = {
    "extremal_table": check_extremal_table,
    "square_bit_table": check_square_bit_table,
    "criterion_oracle": check_criterion_oracle,
    "vanishing": check_vanishing,
    "parallelogram": check_parallelogram,
    "hyperplane_symmetry": check_hyperplane_symmetry,
    "quantum_limit": check_quantum_limit,
    "classical": check_classical,
    "edges": check_edges,
    "determinism": check_determinism,
}


def run_checks(only: Optional[Iterable[str]] = None, cfg: VerifyConfig = VerifyConfig()) -> list[CheckResult]:
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    return [CHECKS[n](cfg) for n in names]
