"""Model files: a JSON schema with canonical serialization and hashing.

Schema (all numbers are finite floats unless noted):

    {
      "dim": p,                       # positive integer
      "a0": [..p floats..],
      "a": [[..], ..],                # p columns, column i is the drift vector a^i
      "A": [[..], ..],                # p+1 upper triangles (row-wise, diagonal
                                      # included) of the symmetric matrices A^i
      "K": [rec | null, ..],          # p+1 records; null or missing = no jumps
      "state_space": {"kind": ...}    # tagged record, see statespace module
    }

Jump records:

    {"family": "finite_atomic", "atoms": [{"weight": w, "z": [..]}, ..]}
    {"family": "exponential_ray", "mass": m, "rate": r, "direction": [..]}
    {"family": "tabulated_density", "weights": [..], "nodes": [[..], ..]}

State-space records:

    {"kind": "canonical", "m": m, "p": p}
    {"kind": "psd_cone", "d": d}            # scaled half-vectorized coordinates
    {"kind": "lorentz", "p": p}
    {"kind": "parabolic", "p": p}
    {"kind": "half_spaces", "normals": [[..], ..], "offsets": [..]}
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .errors import ModelFormatError
from .jumps import measure_from_dict
from .model import AffineModel
from .statespace import space_from_dict


def _upper_triangle(mat):
    p = mat.shape[0]
    return [float(mat[i, j]) for i in range(p) for j in range(i, p)]


def _from_upper_triangle(vals, p, name):
    if len(vals) != p * (p + 1) // 2:
        raise ModelFormatError(
            f"{name}: upper triangle needs {p*(p+1)//2} entries for dim {p}, got {len(vals)}"
        )
    mat = np.zeros((p, p))
    it = iter(vals)
    for i in range(p):
        for j in range(i, p):
            v = float(next(it))
            mat[i, j] = v
            mat[j, i] = v
    return mat


def model_to_dict(model):
    p = model.dim
    return {
        "dim": p,
        "a0": [float(v) for v in model.a0],
        "a": [[float(v) for v in model.a[:, i]] for i in range(p)],
        "A": [_upper_triangle(model.A[i]) for i in range(p + 1)],
        "K": [None if m is None else m.to_dict() for m in model.K],
        "state_space": model.state_space.to_dict(),
    }


def _require(d, key, kind=None):
    if key not in d:
        raise ModelFormatError(f"missing field '{key}'")
    val = d[key]
    if kind is not None and not isinstance(val, kind):
        raise ModelFormatError(f"field '{key}' has the wrong type ({type(val).__name__})")
    return val


def model_from_dict(d):
    if not isinstance(d, dict):
        raise ModelFormatError("model file must hold a JSON object")
    p = _require(d, "dim", int)
    if p < 1:
        raise ModelFormatError("field 'dim' must be a positive integer")
    a0 = np.asarray(_require(d, "a0", list), dtype=float)
    if a0.shape != (p,):
        raise ModelFormatError(f"field 'a0' must list {p} floats")
    cols = _require(d, "a", list)
    if len(cols) != p or any(len(c) != p for c in cols):
        raise ModelFormatError(f"field 'a' must list {p} columns of length {p}")
    a = np.column_stack([np.asarray(c, dtype=float) for c in cols]) if p else np.zeros((0, 0))
    tri = _require(d, "A", list)
    if len(tri) != p + 1:
        raise ModelFormatError(f"field 'A' must list {p + 1} upper triangles")
    A = np.stack([_from_upper_triangle(t, p, f"A[{i}]") for i, t in enumerate(tri)])
    k_recs = d.get("K") or [None] * (p + 1)
    if len(k_recs) != p + 1:
        raise ModelFormatError(f"field 'K' must list {p + 1} records (null allowed)")
    K = [measure_from_dict(rec, p) for rec in k_recs]
    space = space_from_dict(_require(d, "state_space", dict))
    if space.dim != p:
        raise ModelFormatError(
            f"state_space dimension {space.dim} disagrees with dim {p}"
        )
    return AffineModel(a0=a0, a=a, A=A, K=K, state_space=space)


def canonical_json(model):
    """Deterministic serialization: sorted keys, shortest-repr floats."""
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))


def model_hash(model):
    return hashlib.sha256(canonical_json(model).encode()).hexdigest()


def save_model(model, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    try:
        return model_from_dict(d)
    except ModelFormatError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
