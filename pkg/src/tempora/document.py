"""JSON documents for systems, relations and reports, plus CSV ingest.

Rationals travel as exact ``"p/q"`` strings (integers may stay integers),
``null`` marks an undefined tick and product values are JSON arrays.
"""

import csv
import json
import math
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional

import jsonschema

from .errors import DocumentError, TemporaError
from .relations import Flavor, Relation
from .signalmaps import Cell, PhiEntry, QuantizerSpec
from .signals import FiniteAlphabet, ProductSpace, RationalInterval, ValueSpace
from .systems import StateSpacePhiSystem, make_system
from .timecore import EXTERNAL, INTERNAL, TimeAxis, TimeScaleTransformation


@lru_cache(maxsize=None)
def schema(name: str = "system") -> dict:
    text = resources.files("tempora").joinpath("schema", f"{name}.schema.json").read_text()
    return json.loads(text)


def _pointer(path) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path) if path else "/"


def _parse_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, source, None, exc.lineno) from None


def _validate(doc, kind: str, source: str):
    validator = jsonschema.Draft202012Validator(schema(kind))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.path), list(map(str, e.path))))
    if errors:
        err = errors[0]
        raise DocumentError(err.message, source, _pointer(err.absolute_path))


# ---------------------------------------------------------------- values

def fraction_to_json(q):
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _space_to_json(space: Optional[ValueSpace]):
    if space is None:
        return None
    if isinstance(space, FiniteAlphabet):
        return {"kind": "finite-alphabet", "symbols": list(space.symbols)}
    if isinstance(space, RationalInterval):
        return {"kind": "rational-interval", "lo": fraction_to_json(space.lo), "hi": fraction_to_json(space.hi),
                "lo_open": space.lo_open, "hi_open": space.hi_open}
    if isinstance(space, ProductSpace):
        return {"kind": "product", "components": [_space_to_json(c) for c in space.components]}
    raise TypeError(f"cannot serialize value space {space!r}")


def _space_from_json(d):
    if d is None:
        return None
    if d["kind"] == "finite-alphabet":
        return FiniteAlphabet(tuple(d["symbols"]))
    if d["kind"] == "rational-interval":
        return RationalInterval(Fraction(d["lo"]), Fraction(d["hi"]), d.get("lo_open", False),
                                d.get("hi_open", False))
    return ProductSpace(tuple(_space_from_json(c) for c in d["components"]))


def _value_to_json(v):
    if v is None:
        return None
    if isinstance(v, tuple):
        return [_value_to_json(u) for u in v]
    if isinstance(v, Fraction):
        return fraction_to_json(v)
    return v


def _value_from_json(v, space):
    """Decode one w value; the space tells which strings are rationals."""
    if v is None:
        return None
    if isinstance(v, list):
        comps = space.components if isinstance(space, ProductSpace) else (None,) * len(v)
        if len(comps) != len(v):
            raise ValueError(f"product value {v!r} has the wrong arity")
        return tuple(_value_from_json(u, c) for u, c in zip(v, comps))
    if isinstance(space, RationalInterval) and isinstance(v, (int, str)) and not isinstance(v, bool):
        return Fraction(v)
    return v


def _axis_to_json(axis: TimeAxis):
    return {"step": fraction_to_json(axis.step), "horizon": axis.horizon}


def _axis_from_json(d, kind):
    return TimeAxis(Fraction(d["step"]), d["horizon"], kind)


# ---------------------------------------------------------------- systems

def system_to_dict(system: StateSpacePhiSystem, quantizer: Optional[QuantizerSpec] = None) -> dict:
    trajectories = []
    for i, tr in enumerate(system.behavior):
        entries = sorted(system.phi[tr.w.values], key=lambda e: (repr(e.tau.values), repr(e.gamma)))
        trajectories.append({
            "id": tr.id if tr.id is not None else f"tr{i}",
            "w": [_value_to_json(v) for v in tr.w.values],
            "x": list(tr.x.values),
            "phi": [{"gamma": list(e.gamma), "tau": list(e.tau.values)} for e in entries],
        })
    doc = {
        "name": system.name,
        "axiom_class": system.axiom_class,
        "internal_axis": _axis_to_json(system.internal_axis),
        "external_axis": _axis_to_json(system.external_axis),
        "w_space": _space_to_json(system.w_space),
        "gamma_space": _space_to_json(system.gamma_space),
        "x_space": _space_to_json(system.x_space),
        "trajectories": trajectories,
    }
    if quantizer is not None:
        doc["quantizer"] = quantizer_to_dict(quantizer)
    return doc


def system_from_dict(doc: dict, source: str = "<document>") -> StateSpacePhiSystem:
    _validate(doc, "system", source)
    try:
        internal = _axis_from_json(doc["internal_axis"], INTERNAL)
        external = _axis_from_json(doc["external_axis"], EXTERNAL)
        w_space = _space_from_json(doc.get("w_space"))
        trajs = []
        n = internal.size
        for i, t in enumerate(doc["trajectories"]):
            where = f"/trajectories/{i}"
            if len(t["w"]) > n or len(t["x"]) > n:
                raise DocumentError(f"signal longer than the internal grid ({n} ticks)", source, where)
            w = tuple(_value_from_json(v, w_space) for v in t["w"])
            entries = []
            for j, e in enumerate(t["phi"]):
                if len(e["tau"]) > n or len(e["gamma"]) > external.size:
                    raise DocumentError("phi entry longer than its grid", source, f"{where}/phi/{j}")
                tau = tuple(e["tau"]) + (None,) * (n - len(e["tau"]))
                gamma = tuple(e["gamma"]) + (None,) * (external.size - len(e["gamma"]))
                entries.append(PhiEntry(gamma, TimeScaleTransformation(tau, external.horizon)))
            trajs.append((w, tuple(t["x"]), entries))
        return make_system(internal, external, trajs, w_space=w_space,
                           x_space=_space_from_json(doc.get("x_space")),
                           gamma_space=_space_from_json(doc.get("gamma_space")),
                           axiom_class=doc.get("axiom_class", "async"), name=doc.get("name"))
    except DocumentError:
        raise
    except (TemporaError, ValueError, TypeError) as exc:
        raise DocumentError(str(exc), source) from None


def load_system(path) -> StateSpacePhiSystem:
    return system_from_dict(_parse_json(_read(path), str(path)), str(path))


def dump_system(system, path=None, quantizer=None) -> str:
    text = json.dumps(system_to_dict(system, quantizer), indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _read(path) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(exc.strerror or str(exc), str(path)) from None


# ---------------------------------------------------------------- quantizers

def quantizer_to_dict(spec: QuantizerSpec) -> dict:
    return {
        "cells": [{"symbol": c.symbol, "lo": fraction_to_json(c.interval.lo), "hi": fraction_to_json(c.interval.hi),
                   "lo_open": c.interval.lo_open, "hi_open": c.interval.hi_open} for c in spec.cells],
        "mode": spec.mode,
        "repeat_period": None if spec.repeat_period is None else fraction_to_json(spec.repeat_period),
        "external_axis": _axis_to_json(spec.external_axis),
    }


def quantizer_from_dict(doc: dict, source: str = "<document>", external_axis: Optional[TimeAxis] = None):
    sub = schema("system")["$defs"]
    validator = jsonschema.Draft202012Validator({**sub["quantizer"], "$defs": sub})
    errors = sorted(validator.iter_errors(doc), key=lambda e: len(e.path))
    if errors:
        raise DocumentError(errors[0].message, source, _pointer(errors[0].absolute_path))
    if "external_axis" in doc:
        external_axis = _axis_from_json(doc["external_axis"], EXTERNAL)
    if external_axis is None:
        raise DocumentError("quantizer needs an external_axis", source, "/")
    try:
        cells = tuple(Cell(c["symbol"], RationalInterval(Fraction(c["lo"]), Fraction(c["hi"]),
                                                         c.get("lo_open", False), c.get("hi_open", False)))
                      for c in doc["cells"])
        rp = doc.get("repeat_period")
        return QuantizerSpec(cells, doc["mode"], external_axis, None if rp is None else Fraction(rp))
    except ValueError as exc:
        raise DocumentError(str(exc), source) from None


def load_quantizer(path, external_axis=None) -> QuantizerSpec:
    doc = _parse_json(_read(path), str(path))
    if isinstance(doc, dict) and "quantizer" in doc and "cells" not in doc:
        if external_axis is None and "external_axis" in doc:
            external_axis = _axis_from_json(doc["external_axis"], EXTERNAL)
        return quantizer_from_dict(doc["quantizer"], str(path), external_axis)
    return quantizer_from_dict(doc, str(path), external_axis)


# ---------------------------------------------------------------- relations

def relation_to_dict(R: Relation) -> dict:
    return {"flavor": R.flavor.value, "l": R.l, "pairs": [list(p) for p in sorted(R.pairs, key=repr)]}


def relation_from_dict(doc, source: str = "<document>", flavor=None, l=None) -> Relation:
    _validate(doc, "relation", source)
    fl = Flavor.parse(flavor if flavor is not None else doc.get("flavor", "async"))
    return Relation(frozenset(tuple(p) for p in doc["pairs"]), fl, l if l is not None else doc.get("l", 0))


def load_relation(path, flavor=None, l=None) -> Relation:
    return relation_from_dict(_parse_json(_read(path), str(path)), str(path), flavor, l)


def dump_relation(R: Relation, path=None) -> str:
    text = json.dumps(relation_to_dict(R), indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------- reports

def to_jsonable(obj):
    """Best-effort conversion of verdict payloads (tuples, sets, Fractions)."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fraction_to_json(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Flavor):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj, key=repr)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "values") and isinstance(getattr(obj, "values"), tuple):
        return to_jsonable(obj.values)
    return repr(obj)


# ---------------------------------------------------------------- CSV

def read_samples(path, step=None):
    """Read a two-column ``time,value`` CSV into (step, values).

    Times and values are parsed exactly ("0.25" and "1/4" both work). The
    step is the gcd of consecutive time differences unless given; every row
    must sit on that grid starting at time 0. A header row is skipped.
    """
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) < 2:
                    raise DocumentError("expected two columns time,value", str(path), None, lineno)
                try:
                    rows.append((Fraction(row[0].strip()), Fraction(row[1].strip()), lineno))
                except (ValueError, ZeroDivisionError):
                    if not rows and lineno == 1:
                        continue  # header
                    raise DocumentError(f"not an exact number: {row!r}", str(path), None, lineno) from None
    except OSError as exc:
        raise DocumentError(exc.strerror or str(exc), str(path)) from None
    if not rows:
        raise DocumentError("no samples", str(path))
    rows.sort()
    if rows[0][0] != 0:
        raise DocumentError("samples must start at time 0", str(path), None, rows[0][2])
    if step is None:
        diffs = [b[0] - a[0] for a, b in zip(rows, rows[1:]) if b[0] != a[0]]
        if not diffs:
            raise DocumentError("need at least two distinct sample times", str(path))
        num = math.gcd(*(d.numerator * (math.lcm(*(e.denominator for e in diffs)) // d.denominator)
                         for d in diffs))
        step = Fraction(num, math.lcm(*(e.denominator for e in diffs)))
    step = Fraction(step)
    n = int(rows[-1][0] / step) + 1
    values = [None] * n
    for t, v, lineno in rows:
        q = t / step
        if q.denominator != 1:
            raise DocumentError(f"time {t} is off the grid of step {step}", str(path), None, lineno)
        if values[int(q)] is not None:
            raise DocumentError(f"duplicate sample at time {t}", str(path), None, lineno)
        values[int(q)] = v
    return step, values
