"""
Deterministic JSON reports.

Floats are printed with 17 significant digits (``format(x, ".17g")``) so
that identical inputs give byte-identical files.  Complex numbers become
``[re, im]``; non-finite floats become ``null``.  Dict key order is kept.
"""

from __future__ import annotations

import enum
import json
import math
from importlib import resources

from .function_model import Family
from .periodic_points import PeriodicPoint
from .pullback import LandingReport, RayPolyline


def _float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"  # keep floats distinguishable from ints
    return text


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, enum.Enum):
        out.append(json.dumps(obj.value))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, complex):
        out.append(f"[{_float(obj.real)}, {_float(obj.imag)}]")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif hasattr(obj, "item"):  # numpy scalar
        _emit(obj.item(), indent, level, out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Serialize ``obj`` to JSON text with fixed float formatting."""
    out = []
    _emit(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)


def to_jsonable(obj):
    """``json.loads(dumps(obj))``: the plain structure a reader will see."""
    return json.loads(dumps(obj))


# -- record builders ----------------------------------------------------------


def landing_record(rep: LandingReport, family=Family.EXPONENTIAL):
    return {
        "address": rep.address.format(family),
        "status": rep.status_text,
        "landing_point": rep.landing_point,
        "period": rep.period,
        "multiplier": rep.multiplier,
        "classification": rep.classification_text,
        "residual": rep.residual,
        "gap_final": rep.gap_final,
        "steps": rep.steps,
        "slow_mode": rep.slow_mode,
        "note": rep.note,
    }


def point_record(pt: PeriodicPoint):
    return {
        "point": pt.point,
        "period": pt.period,
        "multiplier": pt.multiplier,
        "classification": pt.classification_text,
        "residual": pt.residual,
        "multiple_root": pt.multiple_root,
    }


def ray_record(ray: RayPolyline, family=Family.EXPONENTIAL):
    return {
        "address": ray.address.format(family),
        "t": list(ray.t_values),
        "vertices": list(ray.vertices),
    }


# -- schemas ------------------------------------------------------------------

SCHEMA_NAMES = ("land", "trace-ray", "scan-periodic", "portrait", "hyperbolic", "render", "error")


def load_schema(name):
    """The JSON schema shipped for report ``name``."""
    if name not in SCHEMA_NAMES:
        raise KeyError(name)
    text = resources.files("dreadlock").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)
