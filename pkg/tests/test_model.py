import numpy as np
import pytest

from affinejd.errors import DimensionMismatch, ModelFormatError
from affinejd.jumps import FiniteAtomic
from affinejd.model import (
    AffineModel,
    check_admissibility,
    diffusion_at,
    drift_at,
    exponential_moment_condition,
    in_U,
)
from affinejd.statespace import Canonical, Lorentz, PSDCone


def scalar_model(a0=0.0, a=0.0, A0=0.0, A1=0.0, K=None, space=None):
    return AffineModel(
        a0=[a0], a=[[a]], A=[[[A0]], [[A1]]], K=K, state_space=space or Canonical(1, 1)
    )


def test_drift_examples():
    assert np.allclose(drift_at(scalar_model(a0=1.0), [5.0]), [1.0])
    assert np.allclose(drift_at(scalar_model(a=-2.0), [3.0]), [-6.0])
    m = AffineModel(
        a0=[1.0, 0.0],
        a=[[0.0, 1.0], [1.0, 0.0]],
        A=np.zeros((3, 2, 2)),
        K=None,
        state_space=Canonical(0, 2),
    )
    assert np.allclose(drift_at(m, [2.0, 3.0]), [4.0, 2.0])


def test_diffusion_examples(bad_model):
    ident = AffineModel(
        a0=[0.0, 0.0],
        a=np.zeros((2, 2)),
        A=[np.eye(2), np.zeros((2, 2)), np.zeros((2, 2))],
        K=None,
        state_space=Canonical(0, 2),
    )
    assert np.array_equal(diffusion_at(ident, [7.0, -3.0]), np.eye(2))
    c = diffusion_at(bad_model, [0.4, -1.3])
    assert np.allclose(c, [[0.4, -1.3], [-1.3, -0.4]])
    assert np.array_equal(c, c.T)
    assert np.allclose(diffusion_at(scalar_model(A1=2.0), [3.0]), [[6.0]])


def test_affine_property():
    rng = np.random.default_rng(7)
    m = AffineModel(
        a0=rng.normal(size=3),
        a=rng.normal(size=(3, 3)),
        A=np.stack([np.eye(3)] + [_sym(rng) for _ in range(3)]),
        K=None,
        state_space=Canonical(0, 3),
    )
    for _ in range(50):
        x, y = rng.normal(size=3), rng.normal(size=3)
        alpha = rng.random()
        mix = alpha * x + (1 - alpha) * y
        assert np.allclose(
            drift_at(m, mix),
            alpha * drift_at(m, x) + (1 - alpha) * drift_at(m, y),
            atol=1e-13,
        )
        assert np.allclose(
            diffusion_at(m, mix),
            alpha * diffusion_at(m, x) + (1 - alpha) * diffusion_at(m, y),
            atol=1e-13,
        )


def _sym(rng):
    b = rng.normal(size=(3, 3))
    return b + b.T


def test_dimension_mismatch():
    m = scalar_model()
    with pytest.raises(DimensionMismatch):
        drift_at(m, [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        diffusion_at(m, [1.0, 2.0])


def test_asymmetric_A_rejected():
    with pytest.raises(ModelFormatError):
        AffineModel(
            a0=[0.0, 0.0],
            a=np.zeros((2, 2)),
            A=[np.zeros((2, 2)), [[0.0, 1.0], [0.0, 0.0]], np.zeros((2, 2))],
            K=None,
            state_space=Canonical(0, 2),
        )


def test_indefinite_A0_rejected():
    with pytest.raises(ModelFormatError):
        scalar_model(A0=-1.0)


def test_in_U_examples():
    assert in_U(Canonical(1, 2), [-1.0, 3.0j])
    assert not in_U(Canonical(1, 2), [-1.0, 1.0])
    assert in_U(Lorentz(3), [-2.0, 1.0, 0.0])
    assert not in_U(Lorentz(3), [-1.0, 2.0, 0.0])
    assert in_U(Canonical(1, 1), [0.0])


def test_in_U_psd_cone_trace_pairing():
    from affinejd.statespace import vech

    space = PSDCone(2)
    m = np.array([[1.0, 0.75], [0.75, 1.0]])
    assert in_U(space, -vech(m) + 1j * np.ones(3))
    assert not in_U(space, vech(m))


def test_exponential_moment_condition(cp_model):
    from affinejd.jumps import ExponentialRay, TabulatedDensity

    assert exponential_moment_condition(cp_model) == [True, True]
    ray_model = scalar_model(a0=1.0, K=[ExponentialRay(1.0, 3.0, [1.0]), None])
    assert exponential_moment_condition(ray_model) == [False, True]
    tab_model = scalar_model(a0=1.0, K=[TabulatedDensity([0.5], [[0.5]]), None])
    assert exponential_moment_condition(tab_model) == [True, True]


def test_admissibility_cir_passes(cir_model):
    report = check_admissibility(cir_model, n_samples=200, seed=0)
    assert report.verdict
    assert report.min_eigen_c >= -1e-12


def test_admissibility_planar_example_fails(bad_model):
    report = check_admissibility(bad_model, n_samples=100, seed=1)
    assert not report.verdict
    assert report.min_eigen_c < -1e-3
    # The failure is witnessed at some sampled x != 0.
    assert any(np.linalg.norm(x) > 1e-8 for x in report.sampled_points)


def test_admissibility_negative_weight_fails():
    m = scalar_model(
        a0=1.0,
        K=[FiniteAtomic([0.0], [[1.0]]), FiniteAtomic([-1.0], [[1.0]])],
    )
    report = check_admissibility(m, n_samples=100, seed=2)
    assert not report.verdict
    assert report.min_jump_weight < -1e-6


def test_admissibility_support_closure():
    # A jump pointing out of the half line is caught by the closure check.
    m = scalar_model(a0=1.0, K=[FiniteAtomic([1.0], [[-0.5]]), None])
    report = check_admissibility(m, n_samples=50, seed=3)
    assert not report.verdict
    assert report.support_violations


def test_admissibility_deterministic(cir_model):
    r1 = check_admissibility(cir_model, n_samples=64, seed=9)
    r2 = check_admissibility(cir_model, n_samples=64, seed=9)
    assert r1.min_eigen_c == r2.min_eigen_c
    assert all(np.array_equal(a, b) for a, b in zip(r1.sampled_points, r2.sampled_points))


def test_k_length_validated():
    with pytest.raises(DimensionMismatch):
        scalar_model(K=[None])
