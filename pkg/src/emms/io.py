"""JSON reading and writing for instances, allocations and traces.

Rationals are written as ``"p/q"`` (or ``"p"``) strings; on input decimal
strings, ``"p/q"`` strings and JSON numbers are all accepted.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .allocation import Allocation, Partition, utilities
from .errors import InstanceError, ParseError
from .instance import GENERAL, NETWORK, Instance, as_fraction


def _rat(x, where: str) -> Fraction:
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: not a rational: {x!r}") from None


def _grid(obj, depth: int, where: str):
    if depth == 0:
        return _rat(obj, where)
    if not isinstance(obj, list):
        raise ParseError(f"{where}: expected a list, got {type(obj).__name__}")
    return [_grid(v, depth - 1, f"{where}[{k}]") for k, v in enumerate(obj)]


def instance_to_dict(instance: Instance) -> dict:
    out = {
        "n": instance.n,
        "m": instance.m,
        "model": instance.model,
        "values": [[str(v) for v in row] for row in instance.values],
    }
    if instance.is_network:
        out["weights"] = [[str(w) for w in row] for row in instance.weights]
    else:
        out["cross_values"] = [[[str(v) for v in row] for row in block] for block in instance.cross_values]
    return out


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise ParseError("instance: expected a JSON object")
    model = data.get("model", NETWORK)
    if model not in (NETWORK, GENERAL):
        raise ParseError(f"model: expected 'network' or 'general', got {model!r}")
    if "values" not in data:
        raise ParseError("values: missing")
    values = _grid(data["values"], 2, "values")
    kwargs = {}
    if model == NETWORK:
        if "weights" not in data:
            raise ParseError("weights: missing for network model")
        kwargs["weights"] = _grid(data["weights"], 2, "weights")
    else:
        if "cross_values" not in data:
            raise ParseError("cross_values: missing for general model")
        kwargs["cross_values"] = _grid(data["cross_values"], 3, "cross_values")
    try:
        inst = Instance(values, **kwargs)
    except InstanceError as exc:
        raise ParseError(f"{type(exc).__name__}: {exc}") from None
    for key, got in (("n", inst.n), ("m", inst.m)):
        if key in data and data[key] != got:
            raise ParseError(f"{key}: declared {data[key]} but data has {got}")
    return inst


def _load_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def parse_instance(path) -> Instance:
    try:
        return instance_from_dict(_load_json(path))
    except ParseError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise ParseError(f"{path}: {exc}") from None


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def allocation_to_dict(allocation: Allocation, **extra) -> dict:
    out = {
        "bundles": [list(b) for b in allocation.partition],
        "assignment": list(allocation.assignment),
        "utilities": [str(u) for u in allocation.utilities],
    }
    for k, v in extra.items():
        out[k] = str(v) if isinstance(v, Fraction) else v
    return out


def allocation_from_dict(data, instance: Instance) -> tuple[Allocation, dict]:
    """Rebuild an allocation against ``instance``; utilities are recomputed, never trusted."""
    if not isinstance(data, dict) or "bundles" not in data:
        raise ParseError("allocation: expected an object with 'bundles'")
    try:
        part = Partition(tuple(tuple(int(b) for b in bundle) for bundle in data["bundles"]))
        assignment = tuple(int(a) for a in data.get("assignment", range(instance.n)))
        utils = utilities(instance, part, assignment)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"allocation: {exc}") from None
    meta = {k: v for k, v in data.items() if k not in ("bundles", "assignment", "utilities")}
    return Allocation(part, assignment, utils), meta


def parse_allocation(path, instance: Instance) -> tuple[Allocation, dict]:
    return allocation_from_dict(_load_json(path), instance)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, default=str)
