import numpy as np
import pytest

import oracles
from affinejd.errors import DivergentIntegral, ModelFormatError, QuadratureTailWarning, UnsupportedFamily
from affinejd.jumps import (
    ExponentialRay,
    FiniteAtomic,
    TabulatedDensity,
    combined_sources,
    exp_moment_integral,
)


def test_zero_argument_vanishes():
    measures = [
        FiniteAtomic([2.0, -0.5], [[1.0], [0.3]]),
        ExponentialRay(1.0, 3.0, [1.0]),
        TabulatedDensity([0.1, 0.2], [[0.5], [1.0]]),
    ]
    for m in measures:
        assert exp_moment_integral(m, [0.0]) == 0.0


def test_atomic_hand_value():
    m = FiniteAtomic([2.0], [[1.0]])
    assert np.isclose(exp_moment_integral(m, [1.0]), 2.0 * (np.e - 2.0), rtol=1e-15)


def test_ray_closed_form_value():
    m = ExponentialRay(1.0, 3.0, [1.0])
    assert np.isclose(exp_moment_integral(m, [1.0]), 1.0 / 6.0, rtol=1e-14)


@pytest.mark.parametrize("a", [0.5, -2.0, 1.5 + 2.0j, -0.3 + 4.0j, 2.9])
def test_ray_matches_quadrature_oracle(a):
    mass, rate = 1.7, 3.0
    m = ExponentialRay(mass, rate, [1.0])
    got = exp_moment_integral(m, [a])
    want = oracles.ray_exp_moment_quadrature(mass, rate, a)
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_ray_divergence_raises():
    m = ExponentialRay(1.0, 3.0, [1.0])
    with pytest.raises(DivergentIntegral):
        exp_moment_integral(m, [3.0])
    with pytest.raises(DivergentIntegral):
        exp_moment_integral(m, [4.0 + 1.0j])


@pytest.mark.filterwarnings("ignore::affinejd.errors.QuadratureTailWarning")
def test_real_argument_gives_real_nonnegative_for_nonnegative_measures():
    rng = np.random.default_rng(0)
    measures = [
        FiniteAtomic(rng.random(4), rng.normal(size=(4, 2))),
        ExponentialRay(0.7, 2.5, [0.6, 0.8]),
        TabulatedDensity(rng.random(8), rng.normal(size=(8, 2)) * 0.2),
    ]
    for m in measures:
        for _ in range(25):
            y = rng.normal(size=2)
            if isinstance(m, ExponentialRay) and np.dot(y, m.direction) >= m.rate:
                continue
            val = exp_moment_integral(m, y)
            assert abs(val.imag) < 1e-14 * max(1.0, abs(val))
            assert val.real >= -1e-14


def test_exponential_moment_flags():
    assert FiniteAtomic([1.0], [[1.0]]).has_all_exponential_moments()
    assert not ExponentialRay(1.0, 3.0, [1.0]).has_all_exponential_moments()
    assert TabulatedDensity([0.5], [[1.0]]).has_all_exponential_moments()


def test_damping_shifts():
    m = FiniteAtomic([1.0], [[1.0]])
    damped, shift = m.damped(1)
    assert np.isclose(damped.weights[0], np.exp(-1.0), rtol=1e-15)
    assert np.isclose(shift[0], np.exp(-1.0) - 1.0, rtol=1e-14)
    damped_big, shift_big = m.damped(10**6)
    assert abs(damped_big.weights[0] - 1.0) < 1e-6
    assert abs(shift_big[0]) < 1e-6


def test_damping_unsupported_for_ray():
    with pytest.raises(UnsupportedFamily):
        ExponentialRay(1.0, 3.0, [1.0]).damped(10)


def test_scaling_pushforward():
    m = FiniteAtomic([3.0], [[0.5]])
    s = m.scaled(2)
    assert np.allclose(s.weights, [1.5])
    assert np.allclose(s.atoms, [[1.0]])
    with pytest.raises(UnsupportedFamily):
        TabulatedDensity([0.5], [[1.0]]).scaled(2)


def test_scaling_preserves_exp_moment_identity():
    # integral (e^{y z'} - 1 - y z') dK_n(z') = (1/n) integral at n y of dK.
    m = FiniteAtomic([0.4, 1.1], [[0.3], [0.9]])
    n = 5
    y = 0.37
    lhs = exp_moment_integral(m.scaled(n), [y])
    rhs = exp_moment_integral(m, [n * y]) / n
    assert abs(lhs - rhs) < 1e-14


def test_ray_tabulation_matches_closed_form():
    ray = ExponentialRay(1.2, 3.0, [1.0])
    tab = ray.tabulated(n_nodes=4000)
    got = exp_moment_integral(tab, [0.8])
    want = exp_moment_integral(ray, [0.8])
    assert abs(got - want) < 5e-4 * abs(want) + 1e-8


def test_tabulated_tail_warning():
    # A grid that stops where the integrand is still large.
    nodes = np.linspace(0.1, 1.0, 10)[:, None]
    m = TabulatedDensity(np.full(10, 0.1), nodes)
    with pytest.warns(QuadratureTailWarning):
        exp_moment_integral(m, [3.0])


def test_atoms_must_be_nonzero():
    with pytest.raises(ModelFormatError):
        FiniteAtomic([1.0], [[0.0]])


def test_ray_validation():
    with pytest.raises(ModelFormatError):
        ExponentialRay(1.0, -3.0, [1.0])
    with pytest.raises(ModelFormatError):
        ExponentialRay(1.0, 3.0, [1.0, 1.0])


def test_combined_sources_groups_matching_atoms():
    k0 = FiniteAtomic([2.0], [[1.0, 0.0]])
    k1 = FiniteAtomic([-1.0, 0.5], [[1.0, 0.0], [0.0, 2.0]])
    locs, coefs, rays = combined_sources([k0, k1, None])
    assert locs.shape == (2, 2)
    assert not rays
    # Combined weight at the shared atom: 2 - x_1.
    shared = np.where((locs == [1.0, 0.0]).all(axis=1))[0][0]
    assert np.allclose(coefs[shared], [2.0, -1.0, 0.0])


def test_combined_sources_rays_grouped_by_rate_and_direction():
    r0 = ExponentialRay(1.0, 2.0, [1.0])
    r1 = ExponentialRay(0.5, 2.0, [1.0])
    _, _, rays = combined_sources([r0, r1])
    assert len(rays) == 1
    rate, _, coef = rays[0]
    assert rate == 2.0
    assert np.allclose(coef, [1.0, 0.5])
