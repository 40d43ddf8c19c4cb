"""JSON form ``{interval, order, backend, data}`` for representatives."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .core import RepDistribution
from .primitives import ClosedForm, GridSamples, Interval, PiecewisePolynomial, PowerSum, Primitive

BACKENDS = ("piecewise", "grid", "powersum", "closed_form")


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def primitive_to_dict(g: Primitive) -> dict[str, Any]:
    if isinstance(g, PiecewisePolynomial):
        return {"backend": "piecewise", "data": {"breaks": _floats(g.breaks), "coeffs": _floats(g.coeffs)}}
    if isinstance(g, GridSamples):
        return {"backend": "grid", "data": {"values": _floats(g.values), "interp": g.interp}}
    if isinstance(g, ClosedForm) and g.exact_form is None:
        if not g.name:
            raise ValueError("only named catalog closed forms can be serialised")
        return {"backend": "closed_form", "data": {"catalog": g.name}}
    ps = g.to_powersum()
    data = {"shifts": _floats(ps.shifts), "exponents": _floats(ps.exponents), "coefs": _floats(ps.coefs)}
    if ps.lattice is not None:
        start, step, count = ps.lattice
        data["lattice"] = [float(start), float(step), int(count)]
    return {"backend": "powersum", "data": data}


def primitive_from_dict(iv: Interval, backend: str, data: dict) -> Primitive:
    if backend == "piecewise":
        return PiecewisePolynomial(iv, np.array(data["breaks"], dtype=float), np.array(data["coeffs"], dtype=float))
    if backend == "grid":
        return GridSamples(iv, np.array(data["values"], dtype=float), data.get("interp", "linear"))
    if backend == "powersum":
        lat = data.get("lattice")
        lattice = (float(lat[0]), float(lat[1]), int(lat[2])) if lat else None
        return PowerSum(iv, data["shifts"], data["exponents"], data["coefs"], lattice)
    if backend == "closed_form":
        from .catalog import resolve

        g = resolve(data["catalog"], iv).dist.rep
        if g.interval != iv:
            raise ValueError("catalog entry interval does not match")
        return g
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def to_dict(d: RepDistribution) -> dict[str, Any]:
    iv = d.interval
    out = {"interval": [iv.a, iv.b], "order": d.order}
    out.update(primitive_to_dict(d.rep))
    return out


def from_dict(obj: dict) -> RepDistribution:
    try:
        a, b = obj["interval"]
        iv = Interval(float(a), float(b))
        order = int(obj.get("order", 0))
        g = primitive_from_dict(iv, obj["backend"], obj["data"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed distribution record: {exc}") from exc
    return RepDistribution(order, g)


def dumps(d: RepDistribution) -> str:
    return json.dumps(to_dict(d), sort_keys=True)


def loads(text: str) -> RepDistribution:
    return from_dict(json.loads(text))


def load(path: str | Path) -> RepDistribution:
    return loads(Path(path).read_text())


def dump(d: RepDistribution, path: str | Path) -> None:
    Path(path).write_text(dumps(d) + "\n")
