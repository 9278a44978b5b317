"""Jump-measure families and the exponential-compensator integral
integral of (exp(y.z) - 1 - y.z) against each measure.

Three families are supported so that both the integral and path simulation
are exact or controllably approximate: finite atomic measures, exponential
densities along a ray, and tabulated densities on a fixed grid.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import (
    DimensionMismatch,
    DivergentIntegral,
    ModelFormatError,
    QuadratureTailWarning,
    UnsupportedFamily,
)


class JumpMeasure:
    family = "abstract"
    dim = 0

    def exp_moment(self, y):
        """integral of (exp(y.z) - 1 - y.z) dK for complex y."""
        raise NotImplementedError

    def total_mass(self):
        raise NotImplementedError

    def mean_vector(self):
        """integral of z dK."""
        raise NotImplementedError

    def has_all_exponential_moments(self):
        """Whether exp(k.z) is integrable over {|z|>1} for every real k."""
        raise NotImplementedError

    def support_points(self):
        """Representative support points, used for closure checks."""
        raise NotImplementedError

    def damped(self, n):
        """Multiply the density by exp(-|z|^2/n); returns the damped measure
        and the induced drift shift integral of z (exp(-|z|^2/n)-1) dK."""
        raise UnsupportedFamily(
            f"damping has no closed form for family '{self.family}'; tabulate first"
        )

    def scaled(self, n):
        """The pushforward measure (1/n) K(dz/n): mass w at z becomes w/n at n z."""
        raise UnsupportedFamily(f"scaling is only exact for finite atomic measures, not '{self.family}'")

    def to_dict(self):
        raise NotImplementedError

    def _check_y(self, y):
        y = np.asarray(y, dtype=complex).ravel()
        if y.size != self.dim:
            raise DimensionMismatch(f"argument has length {y.size}, expected {self.dim}")
        return y

    def __eq__(self, other):
        return isinstance(other, JumpMeasure) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


class FiniteAtomic(JumpMeasure):
    """Finitely many (possibly signed) point masses at nonzero atoms."""

    family = "finite_atomic"

    def __init__(self, weights, atoms):
        self.weights = np.asarray(weights, dtype=float).ravel()
        self.atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        if self.atoms.shape[0] != self.weights.size:
            raise ModelFormatError("finite_atomic: weights and atoms disagree in count")
        if np.any(np.all(self.atoms == 0.0, axis=1)):
            raise ModelFormatError("finite_atomic: atoms must be nonzero vectors")
        self.dim = self.atoms.shape[1]

    def exp_moment(self, y):
        y = self._check_y(y)
        e = self.atoms @ y
        return complex(np.sum(self.weights * (np.exp(e) - 1.0 - e)))

    def total_mass(self):
        return float(np.sum(self.weights))

    def mean_vector(self):
        return self.weights @ self.atoms

    def has_all_exponential_moments(self):
        return True

    def support_points(self):
        return self.atoms.copy()

    def damped(self, n):
        factor = np.exp(-np.sum(self.atoms**2, axis=1) / n)
        shift = (self.weights * (factor - 1.0)) @ self.atoms
        return FiniteAtomic(self.weights * factor, self.atoms), shift

    def scaled(self, n):
        return FiniteAtomic(self.weights / n, self.atoms * n)

    def to_dict(self):
        return {
            "family": self.family,
            "atoms": [
                {"weight": float(w), "z": [float(v) for v in z]}
                for w, z in zip(self.weights, self.atoms)
            ],
        }


class ExponentialRay(JumpMeasure):
    """Density mass * rate * exp(-rate s) ds along z = s * direction, s > 0."""

    family = "exponential_ray"

    def __init__(self, mass, rate, direction):
        self.mass = float(mass)
        self.rate = float(rate)
        self.direction = np.asarray(direction, dtype=float).ravel()
        if self.rate <= 0.0:
            raise ModelFormatError("exponential_ray: rate must be positive")
        nrm = np.linalg.norm(self.direction)
        if abs(nrm - 1.0) > 1e-9:
            raise ModelFormatError("exponential_ray: direction must be a unit vector")
        self.dim = self.direction.size

    def exp_moment(self, y):
        y = self._check_y(y)
        a = complex(self.direction @ y)
        if a.real >= self.rate:
            raise DivergentIntegral(
                f"exp moment diverges on ray: Re(y.d)={a.real:.6g} >= rate={self.rate:.6g}"
            )
        return self.mass * a * a / (self.rate * (self.rate - a))

    def total_mass(self):
        return self.mass

    def mean_vector(self):
        return (self.mass / self.rate) * self.direction

    def has_all_exponential_moments(self):
        return False

    def support_points(self):
        # Median and upper-tail quantiles of the exponential jump length.
        qs = -np.log(np.array([0.5, 0.1, 0.01])) / self.rate
        return qs[:, None] * self.direction[None, :]

    def tabulated(self, n_nodes=512, s_max=None):
        """Trapezoid discretization on a ray grid, for workflows (damping)
        that need an atom representation. Grid adequacy is the caller's
        responsibility; the integral warns when the tail looks truncated."""
        if s_max is None:
            s_max = 40.0 / self.rate
        s = np.linspace(s_max / n_nodes, s_max, n_nodes)
        dens = self.mass * self.rate * np.exp(-self.rate * s)
        w = np.full(n_nodes, s[1] - s[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return TabulatedDensity(dens * w, s[:, None] * self.direction[None, :])

    def to_dict(self):
        return {
            "family": self.family,
            "mass": float(self.mass),
            "rate": float(self.rate),
            "direction": [float(v) for v in self.direction],
        }


class TabulatedDensity(JumpMeasure):
    """Quadrature grid (node, weight); the weights already include the
    quadrature rule (e.g. trapezoid cell widths times density values)."""

    family = "tabulated_density"

    def __init__(self, weights, nodes):
        self.weights = np.asarray(weights, dtype=float).ravel()
        self.nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        if self.nodes.shape[0] != self.weights.size:
            raise ModelFormatError("tabulated_density: weights and nodes disagree in count")
        self.dim = self.nodes.shape[1]

    def exp_moment(self, y):
        y = self._check_y(y)
        e = self.nodes @ y
        terms = self.weights * (np.exp(e) - 1.0 - e)
        total = complex(np.sum(terms))
        if terms.size and abs(terms[-1]) > 1e-8 * max(abs(total), 1e-300):
            warnings.warn(
                "tabulated grid may be too short: last-node term is "
                f"{abs(terms[-1]):.3g} against total {abs(total):.3g}",
                QuadratureTailWarning,
                stacklevel=2,
            )
        return total

    def total_mass(self):
        return float(np.sum(self.weights))

    def mean_vector(self):
        return self.weights @ self.nodes

    def has_all_exponential_moments(self):
        # Finitely many nodes: compact support.
        return True

    def support_points(self):
        return self.nodes.copy()

    def damped(self, n):
        factor = np.exp(-np.sum(self.nodes**2, axis=1) / n)
        shift = (self.weights * (factor - 1.0)) @ self.nodes
        return TabulatedDensity(self.weights * factor, self.nodes), shift

    def to_dict(self):
        return {
            "family": self.family,
            "weights": [float(w) for w in self.weights],
            "nodes": [[float(v) for v in z] for z in self.nodes],
        }


def exp_moment_integral(measure, y):
    """integral of (exp(y.z) - 1 - y.z) K(dz) as a complex scalar."""
    return measure.exp_moment(y)


def measure_from_dict(rec, dim):
    if rec is None:
        return None
    if not isinstance(rec, dict) or "family" not in rec:
        raise ModelFormatError("jump measure record needs a 'family' tag")
    family = rec["family"]
    try:
        if family == "finite_atomic":
            atoms = rec["atoms"]
            m = FiniteAtomic([a["weight"] for a in atoms], [a["z"] for a in atoms])
        elif family == "exponential_ray":
            m = ExponentialRay(rec["mass"], rec["rate"], rec["direction"])
        elif family == "tabulated_density":
            m = TabulatedDensity(rec["weights"], rec["nodes"])
        else:
            raise ModelFormatError(f"unknown jump family '{family}'")
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed '{family}' record: {exc}") from exc
    if m.dim != dim:
        raise DimensionMismatch(f"jump measure lives in dimension {m.dim}, model has {dim}")
    return m


def combined_sources(measures):
    """Group K^0..K^p into location-matched sources with affine coefficients.

    Returns (atom_locs, atom_coefs, rays) where the combined weight of atom j
    at state x is atom_coefs[j, 0] + atom_coefs[j, 1:] @ x, and rays is a list
    of (rate, direction, coef) with the same coefficient convention.
    """
    dim = len(measures) - 1
    atom_index = {}
    atom_locs = []
    atom_rows = []
    ray_index = {}
    rays = []

    def atom_key(z):
        return tuple(np.round(z, 12))

    for i, meas in enumerate(measures):
        if meas is None:
            continue
        if isinstance(meas, (FiniteAtomic, TabulatedDensity)):
            locs = meas.atoms if isinstance(meas, FiniteAtomic) else meas.nodes
            for w, z in zip(meas.weights, locs):
                key = atom_key(z)
                if key not in atom_index:
                    atom_index[key] = len(atom_locs)
                    atom_locs.append(np.asarray(z, dtype=float))
                    atom_rows.append(np.zeros(dim + 1))
                atom_rows[atom_index[key]][i] += w
        elif isinstance(meas, ExponentialRay):
            key = (round(meas.rate, 12), atom_key(meas.direction))
            if key not in ray_index:
                ray_index[key] = len(rays)
                rays.append((meas.rate, meas.direction.copy(), np.zeros(dim + 1)))
            rays[ray_index[key]][2][i] += meas.mass
        else:
            raise UnsupportedFamily(f"cannot combine family '{meas.family}'")

    locs = np.array(atom_locs) if atom_locs else np.zeros((0, dim))
    coefs = np.array(atom_rows) if atom_rows else np.zeros((0, dim + 1))
    return locs, coefs, rays
