"""Text formats: theory documents (JSON) and delimited region/limit tables."""
from __future__ import annotations

import json
import math
from typing import Any, Iterable

import numpy as np

from . import __version__
from .geometry import polygon_area
from .theory import (
    Hyperplane,
    Theory,
    theory_from_states,
    hyperplane_or_none,
    theory_from_effects,
)


def fmt(x: float) -> str:
    """17 significant digits; exact round trip for doubles."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite number cannot be serialized")
    if x == 0:
        return "0"
    return format(x, ".17g")


def _dump(obj: Any, level: int = 0) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def theory_document(t: Theory) -> dict:
    hp = t.reflecting_hyperplane
    doc = {
        "name": t.name,
        "d": t.d,
        "extremal_states": None if t.extremal_states is None else t.extremal_states,
        "unit": t.unit,
        "zero": t.zero,
        "extremal_effects": t.extremal_effects,
        "reflecting_hyperplane": None if hp is None else {"normal": list(hp.normal), "offset": hp.offset},
    }
    n = (t.presentation or {}).get("polygon_n")
    if n is not None:
        doc["polygon_n"] = n
    return doc


def theory_to_json(t: Theory) -> str:
    return _dump(theory_document(t)) + "\n"


def theory_from_document(doc: dict) -> Theory:
    for key in ("name", "d", "unit"):
        if key not in doc:
            raise ValueError(f"theory document lacks '{key}'")
    d = int(doc["d"])
    unit = np.asarray(doc["unit"], dtype=float)
    if unit.shape != (d,):
        raise ValueError("unit length disagrees with d")
    states = doc.get("extremal_states")
    effects = doc.get("extremal_effects")
    presentation = {"polygon_n": int(doc["polygon_n"])} if doc.get("polygon_n") is not None else None
    if states:
        t = theory_from_states(doc["name"], np.asarray(states, dtype=float), unit, presentation,
                         None if effects is None else np.asarray(effects, dtype=float))
    elif effects:
        t = theory_from_effects(doc["name"], np.asarray(effects, dtype=float), unit)
    else:
        raise ValueError("theory document needs extremal_states or extremal_effects")
    hp = doc.get("reflecting_hyperplane")
    if hp is not None:
        object.__setattr__(t, "reflecting_hyperplane", Hyperplane(tuple(hp["normal"]), float(hp["offset"])))
    else:
        object.__setattr__(t, "reflecting_hyperplane", hyperplane_or_none(t))
    return t


def theory_from_json(text: str) -> Theory:
    return theory_from_document(json.loads(text))


def _header(meta: dict) -> list[str]:
    lines = [f"# tool=gptcoexist {__version__}"]
    for k, v in meta.items():
        if isinstance(v, (list, tuple, np.ndarray)):
            v = ",".join(fmt(c) for c in v)
        elif isinstance(v, float):
            v = fmt(v)
        lines.append(f"# {k}={v}")
    return lines


def region_csv(report, method: str, probe: dict | None = None) -> str:
    meta = {"n": report.n, "e": tuple(report.fixed_effect), "method": method, "area": report.area}
    if probe is not None:
        meta.update({f"probe_{k}": v for k, v in probe.items()})
    v = report.region.vertices
    if abs(polygon_area(report.region) - report.area) > 1e-9:
        raise ValueError("reported area disagrees with the vertex list")
    lines = _header(meta) + ["x,y"] + [f"{fmt(x)},{fmt(y)}" for x, y in v]
    return "\n".join(lines) + "\n"


def limit_csv(e, rows: Iterable[tuple[int, float, float, float]]) -> str:
    lines = _header({"e": tuple(e)}) + ["n,area,ellipse_area,gap"]
    lines += [f"{n},{fmt(a)},{fmt(b)},{fmt(g)}" for n, a, b, g in rows]
    return "\n".join(lines) + "\n"


def effects_csv(t: Theory) -> str:
    cols = ",".join(f"x{i}" for i in range(t.d))
    lines = _header({"theory": t.name, "count": len(t.extremal_effects)}) + [cols]
    lines += [",".join(fmt(c) for c in row) for row in t.extremal_effects]
    return "\n".join(lines) + "\n"
