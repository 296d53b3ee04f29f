import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kgdamp.semigroup import (
    apply_semigroup, generator, measure_decay_constant, mode_eigenvalues, mode_matrix, propagator_entries,
)
from kgdamp.spectral_core import Field, make_grid
from kgdamp.verification import expm_taylor


def mp_expm(k2, t):
    mpmath.mp.dps = 40
    e = mpmath.expm(mpmath.matrix([[0, 1], [-(1 + mpmath.mpf(k2)), -mpmath.mpf(k2)]]) * t)
    return np.array([[complex(e[i, j]) for j in range(2)] for i in range(2)])


@pytest.mark.parametrize("k2", [0, 1, 2, 7, 100])
def test_identity_at_zero(k2):
    assert np.array_equal(mode_matrix(k2, 0).entries, np.eye(2))


@pytest.mark.parametrize("t", [0.3, 1.0, np.pi / 2, 12.0])
def test_zero_mode_is_rotation(t):
    m = mode_matrix(0, t).entries
    expected = np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])
    assert np.abs(m - expected).max() < 1e-14


def test_mode_one_matches_oracles():
    m = mode_matrix(1, 1.0).entries
    assert np.abs(m - mp_expm(1, 1.0)).max() < 1e-10
    assert np.abs(m - expm_taylor(generator(1))).max() < 1e-10


@pytest.mark.parametrize("k2", [2 + 2 * math.sqrt(2), 2 + 2 * math.sqrt(2) + 1e-9, 4.83, 4.8285])
@pytest.mark.parametrize("t", [1e-4, 0.5, 3.0, 10.0])
def test_near_degenerate_discriminant(k2, t):
    # A ~ 0: the power-series branch must agree with the oracle
    assert np.abs(propagator_entries(k2, t) - mp_expm(k2, t)).max() < 1e-12


def test_large_k2_does_not_overflow():
    m = propagator_entries(np.array([1e4, 1e6, 1e8]), 10.0)
    assert np.all(np.isfinite(m))
    # slow root ~ -1 dominates: entries stay O(e^{-t})
    assert np.abs(m).max() < 1.0


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        propagator_entries(1.0, -0.1)


def test_broadcasting_shape():
    assert propagator_entries(np.arange(5.0)[:, None], np.linspace(0, 1, 3)[None, :]).shape == (5, 3, 2, 2)


def test_eigenvalue_examples():
    ev = mode_eigenvalues(0)
    assert {round(ev.lambda_plus.imag), round(ev.lambda_minus.imag)} == {1, -1}
    assert abs(ev.lambda_plus.real) < 1e-15
    ev = mode_eigenvalues(1)
    assert sorted([ev.lambda_plus, ev.lambda_minus], key=lambda z: z.imag) == pytest.approx(
        [(-1 - 1j * math.sqrt(7)) / 2, (-1 + 1j * math.sqrt(7)) / 2], abs=1e-15)
    ev = mode_eigenvalues(4)
    assert sorted([ev.lambda_plus, ev.lambda_minus], key=lambda z: z.imag) == pytest.approx([-2 - 1j, -2 + 1j], abs=1e-15)


@pytest.mark.parametrize("k2", list(range(0, 60)) + [100, 1024, 10**6])
def test_eigenvalue_invariants(k2):
    ev = mode_eigenvalues(k2)
    ref = sorted(np.roots([1, k2, 1 + k2]), key=lambda z: (z.real, z.imag))
    got = sorted([ev.lambda_plus, ev.lambda_minus], key=lambda z: (z.real, z.imag))
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)
    assert ev.lambda_plus + ev.lambda_minus == pytest.approx(-k2, rel=1e-14, abs=1e-14)
    assert ev.lambda_plus * ev.lambda_minus == pytest.approx(1 + k2, rel=1e-12)
    if k2:
        assert max(ev.lambda_plus.real, ev.lambda_minus.real) <= -0.5


def test_spectral_bound_equality_only_at_k2_one():
    tops = {k2: max(mode_eigenvalues(k2).lambda_plus.real, mode_eigenvalues(k2).lambda_minus.real) for k2 in range(1, 200)}
    assert tops[1] == -0.5
    assert tops[4] == -2.0
    assert all(v < -0.5 for k, v in tops.items() if k != 1)


def test_determinant_identity_sweep():
    for k2 in range(0, 1025, 7):
        for t in (0.01, 0.1, 1.0, 10.0):
            m = mode_matrix(k2, t)
            exact = math.exp(-t * k2)
            scale = float(np.abs(m.entries).max()) ** 2
            if exact > 1e-5 * scale:
                assert m.det == pytest.approx(exact, rel=1e-10)
            else:
                # cancellation in a 2x2 det: only resolvable relative to the entries
                assert abs(m.det - exact) <= 1e-15 * scale


def test_apply_semigroup_examples():
    g = make_grid(1, 16)
    psi = Field.from_function(g, np.cos)
    v = Field.from_function(g, np.sin)
    a, b = apply_semigroup((psi, v), 0.0)
    assert np.array_equal(a.coeffs, psi.coeffs) and np.array_equal(b.coeffs, v.coeffs)
    one = Field.from_modes(g, {(0,): 1})
    a, b = apply_semigroup((one, Field.zeros(g)), np.pi / 2)
    assert np.abs(a.values).max() < 1e-15
    assert np.abs(b.values + 1).max() < 1e-15


def test_mean_mode_conservation_linear(rng):
    g = make_grid(2, 8)
    for _ in range(20):
        th, dth = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = Field.from_modes(g, {(0, 0): th, (1, 0): rng.normal()})
        v = Field.from_modes(g, {(0, 0): dth, (0, -1): rng.normal()})
        a, b = apply_semigroup((psi, v), rng.uniform(0, 30))
        before = abs(th) ** 2 + abs(dth) ** 2
        after = abs(a.coeffs[0, 0]) ** 2 + abs(b.coeffs[0, 0]) ** 2
        assert after == pytest.approx(before, rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2048), st.floats(0, 5), st.floats(0, 5),
       st.complex_numbers(max_magnitude=1e3, allow_nan=False), st.complex_numbers(max_magnitude=1e3, allow_nan=False))
def test_semigroup_law(k2, t1, t2, a, b):
    vec = np.array([a, b])
    lhs = propagator_entries(k2, t2) @ (propagator_entries(k2, t1) @ vec)
    rhs = propagator_entries(k2, t1 + t2) @ vec
    assert np.abs(lhs - rhs).max() <= 1e-9 * max(np.abs(vec).max(), 1e-300)


def test_decay_constant_examples():
    assert measure_decay_constant(50, [0.0]) == pytest.approx(1.0, abs=1e-15)
    c = measure_decay_constant(1, np.linspace(0, 200, 4001))
    assert 1.0 <= c < 10
    assert measure_decay_constant(20, np.linspace(0, 5, 11)) >= 1.0
    with pytest.raises(ValueError):
        measure_decay_constant(0, [1.0])
    with pytest.raises(ValueError):
        measure_decay_constant(5, [])
