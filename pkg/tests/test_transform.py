import math

import numpy as np
import pytest

import oracles
from affinejd.errors import UnsupportedFamily
from affinejd.jumps import ExponentialRay, FiniteAtomic, TabulatedDensity
from affinejd.model import AffineModel
from affinejd.riccati import solve_riccati
from affinejd.statespace import Canonical
from affinejd.transform import (
    damped_model,
    damped_transform_sequence,
    effective_domain_ray,
    infinite_divisibility_check,
    scaled_model,
    transform,
)


def test_transform_trivial(cir_model):
    tv = transform(cir_model, [0.0], [1.0], 1.0)
    assert tv.finite
    assert abs(tv.value - 1.0) < 1e-12


def test_transform_cir_closed_form(cir_model):
    tv = transform(cir_model, [0.5], [1.0], 1.0)
    assert tv.finite
    assert abs(tv.value - 2.0 * np.e) < 1e-7


def test_transform_explosive_branch(cir_model):
    tv = transform(cir_model, [2.0], [1.0], 1.0)  # blow-up at t = 1/2 < 1
    assert tv.kind == "explosive"
    assert tv.value is None


def test_transform_zero_region_branch(bad_model):
    # In v = u_1 + i u_2 the fixture's equation is v' = v^2/2; u = (0, -i)
    # gives v(0) = 1 and blow-up at t = 2, with Re u = 0 so u lies in U.
    u = [0.0, -1.0j]
    before = transform(bad_model, u, [0.3, -0.2], 1.5)
    want = oracles.planar_quadratic_psi(1.5, u)
    assert before.finite
    assert np.max(np.abs(before.psi - want)) < 1e-8
    after = transform(bad_model, u, [0.3, -0.2], 2.5)
    assert after.kind == "zero_region"
    assert after.value == 0.0


def test_transform_zero_region_absorbing(bad_model):
    u = [0.0, -1.0j]
    for t in (2.1, 3.0, 5.0):
        assert transform(bad_model, u, [0.0, 0.0], t).kind == "zero_region"


def test_transform_unknown_branch(bad_model):
    # v(0) = 1 again, but Re u != 0 so u is outside U and non-real.
    tv = transform(bad_model, [1.5, 0.5j], [0.0, 0.0], 2.5)
    assert tv.kind == "unknown"
    assert tv.diagnostic


def test_transform_rejects_states_outside_space(cir_model):
    from affinejd.errors import StateSpaceMismatch

    with pytest.raises(StateSpaceMismatch):
        transform(cir_model, [0.5], [-1.0], 1.0)


def test_characteristic_function_bound(cir_model, cp_model, ou_model):
    rng = np.random.default_rng(21)
    for model in (cir_model, cp_model, ou_model):
        for _ in range(40):
            y = rng.normal(size=model.dim) * 3.0
            x = model.state_space.project(rng.normal(size=model.dim) * 2.0)
            t = 0.1 + 1.4 * rng.random()
            tv = transform(model, 1j * y, x, t)
            assert tv.finite
            assert abs(tv.value) <= 1.0 + 1e-9


def test_transform_conjugate_symmetry(cp_model):
    u = np.array([-0.4 + 1.3j])
    a = transform(cp_model, u, [1.0], 0.8)
    b = transform(cp_model, np.conj(u), [1.0], 0.8)
    assert a.finite and b.finite
    assert abs(b.value - np.conj(a.value)) < 1e-10


def test_transform_monotone_in_horizon(cir_model):
    # Finite at t implies finite at every earlier time (real argument).
    u = [0.8]
    assert transform(cir_model, u, [1.0], 1.2).finite
    for t in (0.3, 0.6, 0.9, 1.19):
        assert transform(cir_model, u, [1.0], t).finite


def test_transform_tower_property(cir_model):
    u = np.array([0.4 + 0.5j])
    s, t = 0.35, 0.45
    x = np.array([1.0])
    whole = transform(cir_model, u, x, s + t)
    sol = solve_riccati(cir_model, u, s)
    psi0_s, psi_s = sol.eval(s)
    inner = transform(cir_model, psi_s, x, t)
    composed = np.exp(psi0_s) * inner.value
    assert abs(whole.value - composed) < 1e-9


def test_ray_probe_cir(cir_model):
    probe = effective_domain_ray(cir_model, [1.0], 1.0)
    assert probe.bounded
    assert abs(probe.lambda_star - 1.0) < 1e-5
    assert probe.bracket_width <= 1e-6 * probe.bracket[1] * 1.001


def test_ray_probe_unbounded_direction(cir_model):
    probe = effective_domain_ray(cir_model, [-1.0], 1.0, lambda_max=64.0)
    assert not probe.bounded
    assert math.isinf(probe.lambda_star)


def test_ray_probe_grows_as_horizon_shrinks(cir_model):
    probe = effective_domain_ray(cir_model, [1.0], 1e-6, lambda_max=1e7)
    # lambda_star = 1/T for this model; at T = 1e-6 it is far out on the ray.
    assert probe.lambda_star > 1e5


def test_damped_model_atom_example():
    m = AffineModel(
        a0=[0.0], a=[[0.0]], A=np.zeros((2, 1, 1)),
        K=[FiniteAtomic([1.0], [[1.0]]), None], state_space=Canonical(1, 1),
    )
    d = damped_model(m, 1)
    assert np.isclose(d.K[0].weights[0], np.exp(-1.0))
    assert np.isclose(d.a0[0], np.exp(-1.0) - 1.0)
    big = damped_model(m, 10**6)
    assert abs(big.K[0].weights[0] - 1.0) < 1e-6
    assert abs(big.a0[0]) < 1e-6


def test_damped_model_without_jumps_is_identity(cir_model):
    assert damped_model(cir_model, 7) is cir_model


def test_damped_model_ray_unsupported():
    m = AffineModel(
        a0=[1.0], a=[[0.0]], A=np.zeros((2, 1, 1)),
        K=[ExponentialRay(1.0, 3.0, [1.0]), None], state_space=Canonical(1, 1),
    )
    with pytest.raises(UnsupportedFamily):
        damped_model(m, 10)


def test_damped_sequence_constant_for_pure_diffusion(cir_model):
    diag = damped_transform_sequence(cir_model, [-0.5 + 1.0j], [1.0], 1.0, [10, 100])
    assert diag.values[0] == diag.values[1]
    assert diag.cauchy_diffs == [0.0]


def test_damped_sequence_at_zero_is_one(cp_model):
    diag = damped_transform_sequence(cp_model, [0.0], [1.0], 1.0, [10, 100])
    assert all(abs(v - 1.0) < 1e-12 for v in diag.values)


def test_damped_sequence_converges_to_undamped(cp_model):
    u = [-1.0 + 2.0j]
    undamped = transform(cp_model, u, [1.0], 1.0)
    diag = damped_transform_sequence(cp_model, u, [1.0], 1.0, [10, 100, 1000])
    errs = [abs(v - undamped.value) for v in diag.values]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_damped_sequence_requires_u_in_U(cp_model):
    with pytest.raises(ValueError):
        damped_transform_sequence(cp_model, [1.0 + 1.0j], [1.0], 1.0, [10])


def test_scaled_model_identity_and_examples(cir_model):
    same = scaled_model(cir_model, 1)
    assert np.array_equal(same.A, cir_model.A)
    doubled = scaled_model(cir_model, 2)
    assert np.array_equal(doubled.A, 2.0 * cir_model.A)
    m = AffineModel(
        a0=[0.0], a=[[0.0]], A=np.zeros((2, 1, 1)),
        K=[FiniteAtomic([3.0], [[0.5]]), None], state_space=Canonical(1, 1),
    )
    s = scaled_model(m, 2)
    assert np.allclose(s.K[0].weights, [1.5])
    assert np.allclose(s.K[0].atoms, [[1.0]])


def test_scaled_model_tabulated_unsupported():
    m = AffineModel(
        a0=[1.0], a=[[0.0]], A=np.zeros((2, 1, 1)),
        K=[TabulatedDensity([0.5], [[0.5]]), None], state_space=Canonical(1, 1),
    )
    with pytest.raises(UnsupportedFamily):
        scaled_model(m, 2)


def test_divisibility_residual_trivial(cir_model):
    assert infinite_divisibility_check(cir_model, [0.3], 0.5, 1) < 1e-13


def test_divisibility_residual_gaussian(ou_model):
    for u in (0.4, -1.2, 0.3 + 0.8j):
        assert infinite_divisibility_check(ou_model, [u], 0.8, 3) < 1e-9


def test_divisibility_residual_cir(cir_model):
    assert infinite_divisibility_check(cir_model, [0.3], 0.5, 2) < 1e-8


def test_divisibility_residual_compound_poisson(cp_model):
    assert infinite_divisibility_check(cp_model, [-0.6 + 0.9j], 0.7, 4) < 1e-9
