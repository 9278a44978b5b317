"""Exponential-moment transform E_x exp(u.X_t) with domain semantics,
effective-domain probing along rays, jump damping, and the parameter-scaling
identity behind infinite divisibility.

The transform value is tagged:

* ``finite``      -- the Riccati solution reached t; value exp(psi0 + psi.x).
* ``explosive``   -- real u whose solution blew up by t: the moment is +inf.
* ``zero_region`` -- non-real u with bounded Re(u.x) on the state space whose
                     solution blew up by t: the transform is identically 0.
* ``unknown``     -- blow-up for a u outside both previous cases; no value
                     is asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ExplosionBeforeHorizon
from .model import AffineModel, in_U, require_in_space
from .riccati import SolverConfig, explosion_time, solve_riccati


@dataclass
class TransformValue:
    kind: str  # "finite" | "explosive" | "zero_region" | "unknown"
    value: Optional[complex] = None
    psi0: Optional[complex] = None
    psi: Optional[np.ndarray] = None
    diagnostic: Optional[str] = None

    @property
    def finite(self):
        return self.kind == "finite"


def transform(model, u, x, t, cfg: Optional[SolverConfig] = None):
    """Evaluate E_x exp(u.X_t) through the Riccati solution, with the
    explosion semantics described in the module docstring."""
    x = require_in_space(model, x)
    u = np.asarray(u, dtype=complex).ravel()
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return TransformValue(
            "finite", value=np.exp(complex(u @ x)), psi0=0.0 + 0.0j, psi=u.copy()
        )
    sol = solve_riccati(model, u, t, cfg)
    if not sol.exploded:
        psi0_t, psi_t = sol.eval(t)
        with np.errstate(over="ignore"):
            value = np.exp(psi0_t + complex(psi_t @ x))
        return TransformValue("finite", value=value, psi0=psi0_t, psi=psi_t)
    if np.all(u.imag == 0.0):
        return TransformValue(
            "explosive",
            diagnostic=f"real argument, blow-up bracket {sol.bracket}: the moment is infinite",
        )
    if in_U(model.state_space, u):
        return TransformValue(
            "zero_region",
            value=0.0 + 0.0j,
            diagnostic=f"u in U, blow-up bracket {sol.bracket}: the transform vanishes",
        )
    return TransformValue(
        "unknown",
        diagnostic=(
            f"blow-up bracket {sol.bracket} for complex u outside U: "
            "no value is asserted for this argument"
        ),
    )


@dataclass
class RayProbe:
    """Location of the effective-domain boundary along a ray of initial
    conditions: lambda_star = inf{lambda >= 0 : blow-up by the horizon}."""

    direction: np.ndarray
    horizon: float
    lambda_star: float  # math.inf when no blow-up up to lambda_max
    bracket: Optional[tuple]
    probes: list = field(default_factory=list)

    @property
    def bracket_width(self):
        return None if self.bracket is None else self.bracket[1] - self.bracket[0]

    @property
    def bounded(self):
        return math.isfinite(self.lambda_star)


def effective_domain_ray(
    model, direction, horizon, lambda_max=1e6, cfg: Optional[SolverConfig] = None, rel_tol=1e-6
):
    """Bisect for lambda_star along u = lambda * direction.

    Monotonicity of blow-up in lambda is assumed from convexity of the
    effective domain (which contains 0). A DivergentIntegral along the probe
    counts as leaving the domain: the transform is not finite there either.
    """
    direction = np.asarray(direction, dtype=float).ravel()
    if not np.any(direction != 0.0):
        raise ValueError("direction must be nonzero")
    if horizon <= 0.0 or lambda_max <= 0.0:
        raise ValueError("horizon and lambda_max must be positive")
    probes = []

    def leaves_domain(lam):
        if lam == 0.0:
            return False
        try:
            res = explosion_time(model, lam * direction, horizon, cfg)
        except Exception as exc:  # DivergentIntegral and solver failures
            probes.append((lam, None, type(exc).__name__))
            return True
        probes.append((lam, res.estimate, res.kind))
        return res.finite

    lam_lo = 0.0
    lam_hi = min(1.0, lambda_max)
    while not leaves_domain(lam_hi):
        lam_lo = lam_hi
        if lam_hi >= lambda_max:
            return RayProbe(direction, horizon, math.inf, None, probes)
        lam_hi = min(2.0 * lam_hi, lambda_max)
    while lam_hi - lam_lo > rel_tol * lam_hi:
        mid = 0.5 * (lam_lo + lam_hi)
        if leaves_domain(mid):
            lam_hi = mid
        else:
            lam_lo = mid
    return RayProbe(direction, horizon, 0.5 * (lam_lo + lam_hi), (lam_lo, lam_hi), probes)


def damped_model(model, n):
    """Damp every jump measure by exp(-|z|^2/n) and shift the drift vectors
    by integral of z (exp(-|z|^2/n) - 1) K^i(dz) accordingly. Exact for atom
    and tabulated families; exponential rays must be tabulated first."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not model.has_jumps:
        return model
    a0 = model.a0.copy()
    a = model.a.copy()
    new_k = []
    for i, meas in enumerate(model.K):
        if meas is None:
            new_k.append(None)
            continue
        damped, shift = meas.damped(n)
        new_k.append(damped)
        if i == 0:
            a0 += shift
        else:
            a[:, i - 1] += shift
    return AffineModel(a0=a0, a=a, A=model.A, K=new_k, state_space=model.state_space)


@dataclass
class DampingDiagnostic:
    n_list: list
    values: list
    cauchy_diffs: list  # |v_{k+1} - v_k|


def damped_transform_sequence(model, u, x, t, n_list, cfg: Optional[SolverConfig] = None):
    """Transform values under damped_model(model, n) for each n, with the
    Cauchy differences of consecutive values as a convergence diagnostic."""
    u = np.asarray(u, dtype=complex).ravel()
    if not in_U(model.state_space, u):
        raise ValueError("u must satisfy sup Re(u.x) < inf over the state space")
    values = []
    for n in n_list:
        tv = transform(damped_model(model, n), u, x, t, cfg)
        if tv.kind in ("finite", "zero_region"):
            values.append(complex(tv.value))
        else:
            raise ExplosionBeforeHorizon(
                f"damped transform at n={n} returned '{tv.kind}': {tv.diagnostic}"
            )
    diffs = [abs(values[k + 1] - values[k]) for k in range(len(values) - 1)]
    return DampingDiagnostic(list(n_list), values, diffs)


def scaled_model(model, n):
    """The parameter set (a^i, n A^i, (1/n) K^i(dz/n)): diffusion matrices
    scaled by n and each atom (w, z) replaced by (w/n, n z)."""
    if n <= 0:
        raise ValueError("n must be positive")
    new_k = []
    for meas in model.K:
        if meas is None:
            new_k.append(None)
        else:
            new_k.append(meas.scaled(n))  # UnsupportedFamily for non-atomic
    return AffineModel(
        a0=model.a0, a=model.a, A=model.A * float(n), K=new_k, state_space=model.state_space
    )


def infinite_divisibility_check(model, u, t, n, cfg: Optional[SolverConfig] = None):
    """Residual of the scaling identity: the solution of the scaled system
    started at u must equal 1/n times the solution of the base system
    started at n u, componentwise including the zeroth component."""
    u = np.asarray(u, dtype=complex).ravel()
    if t <= 0.0:
        raise ValueError("t must be positive")
    scaled = solve_riccati(scaled_model(model, n), u, t, cfg)
    base = solve_riccati(model, n * u, t, cfg)
    if scaled.exploded or base.exploded:
        raise ExplosionBeforeHorizon("solution explodes before t in the scaling check")
    psi0_s, psi_s = scaled.eval(t)
    psi0_b, psi_b = base.eval(t)
    return max(
        abs(psi0_s - psi0_b / n),
        float(np.max(np.abs(psi_s - psi_b / n))) if u.size else 0.0,
    )
