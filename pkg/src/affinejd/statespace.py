"""Closed convex state spaces: membership, Euclidean projection, interior
tests, and boundedness of linear functionals.

Supported families: the canonical orthant-times-free space R_+^m x R^(p-m),
the positive semidefinite cone in half-vectorized coordinates, the Lorentz
cone, the parabolic set {x : x_1 >= |x_bar|^2}, and finite intersections of
half spaces.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq, linprog, nnls

from .errors import DimensionMismatch, ModelFormatError

_SQRT2 = np.sqrt(2.0)


def vech(mat):
    """Half-vectorize a symmetric matrix, scaling off-diagonal entries by
    sqrt(2) so the Euclidean inner product of images equals trace(XY)."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    iu, ju = np.triu_indices(d)
    out = mat[iu, ju].copy()
    out[iu != ju] *= _SQRT2
    return out


def unvech(x, d):
    """Inverse of :func:`vech` for dimension ``d``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (d * (d + 1) // 2,):
        raise DimensionMismatch(f"vech vector has length {x.size}, expected {d*(d+1)//2}")
    mat = np.zeros((d, d))
    iu, ju = np.triu_indices(d)
    vals = x.copy()
    vals[iu != ju] /= _SQRT2
    mat[iu, ju] = vals
    mat[ju, iu] = vals
    return mat


class StateSpace:
    """Base class; concrete families implement the geometric primitives."""

    kind = "abstract"
    dim = 0

    def contains(self, x, tol=1e-9):
        raise NotImplementedError

    def interior_contains(self, x, margin=0.0):
        raise NotImplementedError

    def project(self, x):
        raise NotImplementedError

    def project_batch(self, xs):
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        return np.stack([self.project(x) for x in xs])

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.project(x)))

    def bounded_support(self, r, tol=1e-12):
        """True iff sup over the space of r.x is finite."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def _check_dim(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point has shape {x.shape}, expected ({self.dim},)")
        return x

    def __eq__(self, other):
        return isinstance(other, StateSpace) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items(), key=lambda kv: kv[0])))

    def __repr__(self):
        fields = ", ".join(f"{k}={v}" for k, v in self.to_dict().items() if k != "kind")
        return f"{type(self).__name__}({fields})"


class Canonical(StateSpace):
    """R_+^m x R^(p-m): the first ``m`` coordinates are nonnegative."""

    kind = "canonical"

    def __init__(self, m, p):
        if not (0 <= m <= p) or p < 1:
            raise ModelFormatError(f"canonical space needs 0 <= m <= p, got m={m}, p={p}")
        self.m = int(m)
        self.dim = int(p)

    def contains(self, x, tol=1e-9):
        x = self._check_dim(x)
        return bool(np.all(x[: self.m] >= -tol))

    def interior_contains(self, x, margin=0.0):
        x = self._check_dim(x)
        return bool(np.all(x[: self.m] > margin))

    def project(self, x):
        x = self._check_dim(x).copy()
        x[: self.m] = np.maximum(x[: self.m], 0.0)
        return x

    def project_batch(self, xs):
        xs = np.array(np.atleast_2d(xs), dtype=float)
        xs[:, : self.m] = np.maximum(xs[:, : self.m], 0.0)
        return xs

    def bounded_support(self, r, tol=1e-12):
        r = self._check_dim(r)
        return bool(np.all(r[: self.m] <= tol) and np.all(np.abs(r[self.m:]) <= tol))

    def to_dict(self):
        return {"kind": self.kind, "m": self.m, "p": self.dim}


class PSDCone(StateSpace):
    """Positive semidefinite d x d matrices in scaled half-vectorized
    coordinates (off-diagonals carry a sqrt(2) factor), so Euclidean
    geometry on the coordinates matches Frobenius geometry on matrices."""

    kind = "psd_cone"

    def __init__(self, d):
        if d < 1:
            raise ModelFormatError(f"psd cone needs d >= 1, got {d}")
        self.d = int(d)
        self.dim = self.d * (self.d + 1) // 2

    def _eigvals(self, x):
        return np.linalg.eigvalsh(unvech(self._check_dim(x), self.d))

    def contains(self, x, tol=1e-9):
        return bool(self._eigvals(x).min() >= -tol)

    def interior_contains(self, x, margin=0.0):
        return bool(self._eigvals(x).min() > margin)

    def project(self, x):
        mat = unvech(self._check_dim(x), self.d)
        w, v = np.linalg.eigh(mat)
        w = np.maximum(w, 0.0)
        return vech((v * w) @ v.T)

    def bounded_support(self, r, tol=1e-12):
        # Self-dual under the trace product, which the scaling makes Euclidean.
        return self.contains(-self._check_dim(r), tol=tol)

    def to_dict(self):
        return {"kind": self.kind, "d": self.d}


class Lorentz(StateSpace):
    """The cone {x in R^p : x_1 >= |(x_2..x_p)|}."""

    kind = "lorentz"

    def __init__(self, p):
        if p < 2:
            raise ModelFormatError(f"lorentz cone needs p >= 2, got {p}")
        self.dim = int(p)

    def contains(self, x, tol=1e-9):
        x = self._check_dim(x)
        return bool(x[0] >= np.linalg.norm(x[1:]) - tol)

    def interior_contains(self, x, margin=0.0):
        x = self._check_dim(x)
        return bool(x[0] - np.linalg.norm(x[1:]) > margin)

    def project(self, x):
        x = self._check_dim(x)
        tail = np.linalg.norm(x[1:])
        if x[0] >= tail:
            return x.copy()
        if x[0] <= -tail:
            return np.zeros_like(x)
        alpha = 0.5 * (x[0] + tail)
        out = np.empty_like(x)
        out[0] = alpha
        out[1:] = x[1:] * (alpha / tail)
        return out

    def bounded_support(self, r, tol=1e-12):
        return self.contains(-self._check_dim(r), tol=tol)

    def to_dict(self):
        return {"kind": self.kind, "p": self.dim}


class Parabolic(StateSpace):
    """The set {x in R^p : x_1 >= x_2^2 + ... + x_p^2}."""

    kind = "parabolic"

    def __init__(self, p):
        if p < 2:
            raise ModelFormatError(f"parabolic space needs p >= 2, got {p}")
        self.dim = int(p)

    def _slack(self, x):
        return x[0] - float(np.dot(x[1:], x[1:]))

    def contains(self, x, tol=1e-9):
        x = self._check_dim(x)
        return bool(self._slack(x) >= -tol)

    def interior_contains(self, x, margin=0.0):
        x = self._check_dim(x)
        return bool(self._slack(x) > margin)

    def project(self, x):
        x = self._check_dim(x)
        if self._slack(x) >= 0.0:
            return x.copy()
        tail_sq = float(np.dot(x[1:], x[1:]))

        # KKT: y1 = x1 + mu, y_bar = x_bar / (1 + 2 mu), active constraint.
        def g(mu):
            return (x[0] + mu) * (1.0 + 2.0 * mu) ** 2 - tail_sq

        lo = max(0.0, -x[0])
        hi = max(lo + 1.0, 1.0)
        while g(hi) < 0.0:
            hi *= 2.0
        mu = brentq(g, lo, hi, xtol=1e-14, rtol=1e-14)
        out = np.empty_like(x)
        out[1:] = x[1:] / (1.0 + 2.0 * mu)
        out[0] = float(np.dot(out[1:], out[1:]))
        return out

    def bounded_support(self, r, tol=1e-12):
        r = self._check_dim(r)
        if r[0] < -tol:
            return True
        return bool(np.all(np.abs(r) <= tol))

    def to_dict(self):
        return {"kind": self.kind, "p": self.dim}


class HalfSpaceIntersection(StateSpace):
    """{x : normals @ x <= offsets}; rejected at construction if the
    interior is empty (lower-dimensional sets are out of scope)."""

    kind = "half_spaces"

    def __init__(self, normals, offsets):
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.asarray(offsets, dtype=float).ravel()
        if normals.shape[0] != offsets.size:
            raise ModelFormatError("half-space normals and offsets disagree in count")
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms == 0.0):
            raise ModelFormatError("half-space normal must be nonzero")
        self.normals = normals
        self.offsets = offsets
        self.dim = normals.shape[1]
        self._check_full_dimensional()

    def _check_full_dimensional(self):
        # Chebyshev center: max t s.t. Nx + t|n_k| <= c; t <= 0 means no interior.
        k, p = self.normals.shape
        norms = np.linalg.norm(self.normals, axis=1)
        c_obj = np.zeros(p + 1)
        c_obj[-1] = -1.0
        a_ub = np.hstack([self.normals, norms[:, None]])
        bounds = [(None, None)] * p + [(None, 1.0)]
        res = linprog(c_obj, A_ub=a_ub, b_ub=self.offsets, bounds=bounds, method="highs")
        if not res.success or -res.fun <= 1e-12:
            raise ModelFormatError("half-space intersection has empty interior")
        self._center = res.x[:-1]

    def contains(self, x, tol=1e-9):
        x = self._check_dim(x)
        return bool(np.max(self.normals @ x - self.offsets) <= tol)

    def interior_contains(self, x, margin=0.0):
        x = self._check_dim(x)
        return bool(np.max(self.normals @ x - self.offsets) < -margin)

    def project(self, x, max_iter=2000, tol=1e-12):
        # Dykstra's alternating projection over the individual half spaces.
        x = self._check_dim(x)
        if self.contains(x, tol=0.0):
            return x.copy()
        k = self.normals.shape[0]
        y = x.copy()
        corrections = np.zeros((k, self.dim))
        for _ in range(max_iter):
            shift = 0.0
            for j in range(k):
                z = y + corrections[j]
                n = self.normals[j]
                viol = float(n @ z - self.offsets[j])
                if viol > 0.0:
                    proj = z - (viol / float(n @ n)) * n
                else:
                    proj = z
                corrections[j] = z - proj
                shift = max(shift, float(np.linalg.norm(proj - y)))
                y = proj
            if shift <= tol:
                break
        return y

    def bounded_support(self, r, tol=1e-9):
        # sup r.x finite iff r is a nonnegative combination of the normals.
        r = self._check_dim(r)
        _, resid = nnls(self.normals.T, r)
        return bool(resid <= tol * (1.0 + np.linalg.norm(r)))

    def to_dict(self):
        return {
            "kind": self.kind,
            "normals": [list(map(float, row)) for row in self.normals],
            "offsets": [float(v) for v in self.offsets],
        }


_KINDS = {
    "canonical": Canonical,
    "psd_cone": PSDCone,
    "lorentz": Lorentz,
    "parabolic": Parabolic,
    "half_spaces": HalfSpaceIntersection,
}


def space_from_dict(rec):
    """Build a state space from its tagged-record form."""
    if not isinstance(rec, dict) or "kind" not in rec:
        raise ModelFormatError("state_space: expected a record with a 'kind' tag")
    kind = rec["kind"]
    try:
        if kind == "canonical":
            return Canonical(rec["m"], rec["p"])
        if kind == "psd_cone":
            return PSDCone(rec["d"])
        if kind == "lorentz":
            return Lorentz(rec["p"])
        if kind == "parabolic":
            return Parabolic(rec["p"])
        if kind == "half_spaces":
            return HalfSpaceIntersection(rec["normals"], rec["offsets"])
    except KeyError as exc:
        raise ModelFormatError(f"state_space: missing field {exc} for kind '{kind}'") from exc
    raise ModelFormatError(f"state_space: unknown kind '{kind}'")
