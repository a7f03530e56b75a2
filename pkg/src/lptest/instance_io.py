"""Instance file format: versioned JSON with lossless decimal number strings.

Numbers are serialized as shortest round-trip decimal strings of their
binary64 values (Python ``repr``), so parse(serialize(x)) is bit-identical.
Ingest can normalize coordinates into [-1, 1]^d, rescaling thresholds
consistently and recording the applied scale.
"""

from __future__ import annotations

import json
from typing import IO

from .constraints import (
    Ball,
    ConstraintSet,
    HalfSpace,
    Kind,
    LabeledPoint,
    Point,
    ProblemInstance,
)
from .errors import BadSpecError

SCHEMA = "lptest-instance/1"


def _num(x: float) -> str:
    return repr(float(x))


def _item_to_json(item) -> dict:
    if isinstance(item, Point):
        return {"point": [_num(c) for c in item.coords]}
    if isinstance(item, Ball):
        return {"center": [_num(c) for c in item.center], "radius": _num(item.radius)}
    if isinstance(item, HalfSpace):
        return {"normal": [_num(c) for c in item.normal],
                "offset": _num(item.offset), "sense": item.sense}
    if isinstance(item, LabeledPoint):
        return {"point": [_num(c) for c in item.coords], "label": item.label}
    raise BadSpecError(f"unknown item type {type(item)}")


def _item_from_json(d: dict):
    if "normal" in d:
        return HalfSpace(tuple(float(v) for v in d["normal"]),
                         float(d["offset"]), d["sense"])
    if "center" in d:
        return Ball(tuple(float(v) for v in d["center"]), float(d["radius"]))
    if "label" in d:
        return LabeledPoint(tuple(float(v) for v in d["point"]), int(d["label"]))
    if "point" in d:
        return Point(tuple(float(v) for v in d["point"]))
    raise BadSpecError(f"unrecognized item record: {sorted(d)}")


def instance_to_json(instance: ProblemInstance, metadata: dict | None = None) -> dict:
    return {
        "format": SCHEMA,
        "kind": instance.kind.value,
        "dim": instance.dim,
        "delta": instance.delta,
        "k": None if instance.k is None else _num(instance.k),
        "items": [_item_to_json(it) for it in instance.constraints.items],
        "multiplicities": list(instance.constraints.multiplicities),
        "metadata": metadata or {},
    }


def instance_from_json(doc: dict) -> tuple[ProblemInstance, dict]:
    if doc.get("format") != SCHEMA:
        raise BadSpecError(f"unsupported format {doc.get('format')!r}; "
                           f"expected {SCHEMA}")
    items = tuple(_item_from_json(d) for d in doc["items"])
    cset = ConstraintSet(items, tuple(int(m) for m in doc["multiplicities"]),
                         int(doc["dim"]))
    k = None if doc.get("k") is None else float(doc["k"])
    inst = ProblemInstance(cset, Kind(doc["kind"]), int(doc["delta"]), k)
    return inst, doc.get("metadata", {})


def dumps(instance: ProblemInstance, metadata: dict | None = None) -> str:
    return json.dumps(instance_to_json(instance, metadata), sort_keys=True,
                      indent=1) + "\n"


def loads(text: str) -> tuple[ProblemInstance, dict]:
    return instance_from_json(json.loads(text))


def save_instance(path, instance: ProblemInstance, metadata: dict | None = None):
    if hasattr(path, "write"):
        path.write(dumps(instance, metadata))
        return
    with open(path, "w") as fh:
        fh.write(dumps(instance, metadata))


def load_instance(path) -> tuple[ProblemInstance, dict]:
    if hasattr(path, "read"):
        return loads(path.read())
    with open(path) as fh:
        return loads(fh.read())


def normalize_instance(instance: ProblemInstance) -> tuple[ProblemInstance, dict]:
    """Scale coordinates into [-1, 1]^d, rescaling the threshold to match.

    Enclosing-ball thresholds scale linearly, the annulus squared-width
    threshold quadratically; half-space offsets scale with the points.  The
    applied scale is returned so reports can recover original units.
    """
    items = instance.constraints.items
    scale = 1.0
    for it in items:
        if isinstance(it, (Point, LabeledPoint)):
            scale = max(scale, max(abs(c) for c in it.coords))
        elif isinstance(it, Ball):
            scale = max(scale, max(abs(c) for c in it.center) + it.radius)
    if scale <= 1.0:
        return instance, {"scale": 1.0}

    def scale_item(it):
        if isinstance(it, Point):
            return Point(tuple(c / scale for c in it.coords))
        if isinstance(it, LabeledPoint):
            return LabeledPoint(tuple(c / scale for c in it.coords), it.label)
        if isinstance(it, Ball):
            return Ball(tuple(c / scale for c in it.center), it.radius / scale)
        if isinstance(it, HalfSpace):
            return HalfSpace(it.normal, it.offset / scale, it.sense)
        raise BadSpecError(type(it))

    k = instance.k
    if k is not None:
        if instance.kind is Kind.ANNULUS:
            k = k / scale**2
        else:
            k = k / scale
    cset = ConstraintSet(tuple(scale_item(it) for it in items),
                         instance.constraints.multiplicities, instance.dim)
    return (ProblemInstance(cset, instance.kind, instance.delta, k),
            {"scale": scale})
