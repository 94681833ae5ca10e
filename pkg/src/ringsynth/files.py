"""JSON I/O for exact matrices, circuits and gate-set caches.

Everything is integers: a matrix entry is the length-d coordinate vector of
its numerator over the field's power basis, and the whole matrix carries one
denominator exponent.  No floating point appears anywhere in the formats.
"""

from __future__ import annotations

import hashlib
import json
import os

from .exactlinalg import ExactMatrix
from .normalize import GateSet, catalogue_seeds, gate_set_from_generators, \
    normalize_gate_set
from .numberfield import field_spec
from .synth import Circuit


class FileFormatError(ValueError):
    """Input file does not match the expected schema."""


# -- exact matrices ---------------------------------------------------------


def matrix_to_obj(m: ExactMatrix) -> dict:
    return {
        "field": m.field.name,
        "rows": m.rows,
        "cols": m.cols,
        "denom_exp": m.denom_exp,
        "entries": [[list(e) for e in row] for row in m.num],
    }


def matrix_from_obj(obj) -> ExactMatrix:
    try:
        f = field_spec(obj["field"])
        rows, cols, k = obj["rows"], obj["cols"], obj["denom_exp"]
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"malformed matrix object: {exc}") from exc
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise FileFormatError("entry grid does not match rows x cols")
    num = []
    for row in entries:
        out = []
        for e in row:
            if len(e) != f.degree or not all(isinstance(c, int) for c in e):
                raise FileFormatError(
                    f"entry {e} is not a length-{f.degree} integer vector")
            out.append(tuple(e))
        num.append(out)
    if not isinstance(k, int) or k < 0:
        raise FileFormatError(f"bad denominator exponent {k!r}")
    return ExactMatrix(f, num, k)


def write_matrix(path, m: ExactMatrix):
    with open(path, "w") as fh:
        json.dump(matrix_to_obj(m), fh)
        fh.write("\n")


def read_matrix(path) -> ExactMatrix:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    return matrix_from_obj(obj)


# -- circuits ---------------------------------------------------------------


def circuit_to_obj(c: Circuit, gs: GateSet) -> dict:
    return {
        "gateset": {"name": gs.name, "hash": gate_set_hash(gs)},
        "labels": list(c.labels),
        "remainder": matrix_to_obj(c.remainder),
        "cost": c.cost,
        "stats": dict(c.stats),
    }


def circuit_from_obj(obj):
    """(Circuit, gate-set name, gate-set content hash) from a parsed object."""
    try:
        gsinfo = obj["gateset"]
        c = Circuit(gsinfo["name"], list(obj["labels"]),
                    matrix_from_obj(obj["remainder"]), obj["cost"],
                    dict(obj.get("stats", {})))
        return c, gsinfo["name"], gsinfo["hash"]
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"malformed circuit object: {exc}") from exc


def write_circuit(path, c: Circuit, gs: GateSet):
    with open(path, "w") as fh:
        json.dump(circuit_to_obj(c, gs), fh, indent=1)
        fh.write("\n")


def read_circuit(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    return circuit_from_obj(obj)


# -- gate-set caching -------------------------------------------------------


def _seed_fingerprint(name, n):
    f, kind, seeds = catalogue_seeds(name, n)
    blob = json.dumps({
        "field": f.name,
        "n": n,
        "kind": kind,
        "seeds": [[lab, matrix_to_obj(m)] for lab, m in seeds],
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def gate_set_hash(gs: GateSet) -> str:
    """Content hash of what the normalized set was built from."""
    return _seed_fingerprint(gs.name, gs.n)


def save_gate_set(path, gs: GateSet):
    obj = {
        "name": gs.name,
        "field": gs.field.name,
        "n": gs.n,
        "kind": gs.cost_zero_kind,
        "hash": gate_set_hash(gs),
        "generators": [
            {"label": g.label, "cost": g.cost, "matrix": matrix_to_obj(g.matrix)}
            for g in gs.generators
        ],
    }
    with open(path, "w") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def load_gate_set(path) -> GateSet:
    try:
        with open(path) as fh:
            obj = json.load(fh)
        f = field_spec(obj["field"])
        labeled = [(g["label"], matrix_from_obj(g["matrix"]), g["cost"])
                   for g in obj["generators"]]
        gs = gate_set_from_generators(labeled, obj["kind"], obj["n"], f,
                                      obj["name"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"malformed gate-set cache: {exc}") from exc
    if obj["hash"] != _seed_fingerprint(obj["name"], obj["n"]):
        raise FileFormatError("gate-set cache is stale (seed hash mismatch)")
    return gs


def cached_gate_set(name, n, cache_dir=None, cost_override=None) -> GateSet:
    """Load the normalized set from cache, or normalize and store it.

    Cache entries are invalidated by a content hash over (field, n, seeds,
    cost-zero kind); an override cost table bypasses the cache entirely.
    """
    if cache_dir is None or cost_override:
        return named_gate_set_checked(name, n, cost_override)
    safe = name.replace("+", "_").replace(",", "-")
    path = os.path.join(cache_dir, f"{safe}_n{n}.json")
    if os.path.exists(path):
        try:
            return load_gate_set(path)
        except FileFormatError:
            pass  # stale or corrupt: rebuild below
    gs = named_gate_set_checked(name, n, None)
    os.makedirs(cache_dir, exist_ok=True)
    save_gate_set(path, gs)
    return gs


def named_gate_set_checked(name, n, cost_override):
    f, kind, seeds = catalogue_seeds(name, n)
    return normalize_gate_set(seeds, kind, n, f, cost_override, name)
