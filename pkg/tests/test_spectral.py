import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncspde.spectral import (
    ModeBasis,
    TimeGrid,
    dst1_fft,
    dst1_naive,
    floor_grid,
    lq_norm_pow,
)

# high-precision values (mpmath, 40 digits)
EXP_MINUS_PI2_OVER_10 = 0.3727078388534379135776020928393564131313


def test_eigenvalues():
    assert ModeBasis(4).eigenvalue(1) == pytest.approx(math.pi**2, rel=1e-15)
    assert ModeBasis(4, nu=2.0).eigenvalue(3) == pytest.approx(18 * math.pi**2, rel=1e-15)
    lam = ModeBasis(50, nu=0.3).eigenvalues
    assert np.all(lam > 0) and np.all(np.diff(lam) > 0)


@pytest.mark.parametrize("k", [0, 5, -1])
def test_eigenvalue_out_of_range(k):
    with pytest.raises(IndexError):
        ModeBasis(4).eigenvalue(k)


def test_invalid_basis():
    with pytest.raises(ValueError):
        ModeBasis(0)
    with pytest.raises(ValueError):
        ModeBasis(3, nu=0.0)


def test_to_grid_examples():
    np.testing.assert_allclose(ModeBasis(1).to_grid(np.array([1.0])), [math.sqrt(2)], rtol=1e-15)
    np.testing.assert_allclose(
        ModeBasis(3).to_grid(np.array([1.0, 0.0, 0.0])), [1.0, math.sqrt(2), 1.0], rtol=1e-14
    )
    np.testing.assert_array_equal(ModeBasis(7).to_grid(np.zeros(7)), np.zeros(7))


def test_to_spectral_example():
    c = ModeBasis(3).to_spectral(np.array([1.0, math.sqrt(2), 1.0]))
    np.testing.assert_allclose(c, [1.0, 0.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("K", [1, 2, 3, 16, 255, 256, 257, 600, 1024])
@pytest.mark.parametrize("method", ["matrix", "fft"])
def test_round_trip_and_parseval(K, method, rng):
    b = ModeBasis(K, method=method)
    c = rng.standard_normal(K)
    u = b.to_grid(c)
    np.testing.assert_allclose(b.to_spectral(u), c, rtol=1e-12, atol=1e-12 * np.abs(c).max())
    assert lq_norm_pow(u, 2) == pytest.approx(np.sum(c**2), rel=1e-12)


@pytest.mark.parametrize("K", [1, 5, 64, 257])
def test_fft_matches_naive(K, rng):
    x = rng.standard_normal(K)
    np.testing.assert_allclose(dst1_fft(x), dst1_naive(x), rtol=0, atol=1e-10 * np.abs(x).sum())


def test_batched_transform(rng):
    b = ModeBasis(32)
    C = rng.standard_normal((5, 32))
    U = b.to_grid(C)
    for i in range(5):
        np.testing.assert_allclose(U[i], b.to_grid(C[i]), rtol=1e-13, atol=1e-13)


def test_semigroup():
    b = ModeBasis(3)
    c = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(b.semigroup_apply(c, 0.0), c)
    assert b.semigroup_factors(0.1)[0] == pytest.approx(EXP_MINUS_PI2_OVER_10, rel=1e-14)
    f1, f2 = b.semigroup_factors(1.0), b.semigroup_factors(2.0)
    assert np.all(f2 < f1) and np.all(f1 < 1)
    with pytest.raises(ValueError):
        b.semigroup_apply(c, -0.1)


def test_resolvent():
    b = ModeBasis(3)
    c = np.ones(3)
    np.testing.assert_array_equal(b.resolvent_apply(c, 0.0), c)
    assert b.resolvent_apply(c, 1 / math.pi**2)[0] == pytest.approx(0.5, rel=1e-15)
    assert b.resolvent_apply(c, 0.25)[1] == pytest.approx(1 / (1 + math.pi**2), rel=1e-15)
    with pytest.raises(ValueError):
        b.resolvent_apply(c, -1.0)


def test_cn_factors():
    b = ModeBasis(2)
    num, den = b.cn_factors(0.0)
    np.testing.assert_array_equal(num / den, [1.0, 1.0])
    t = 2 / math.pi**2
    num, den = b.cn_factors(t)
    assert num[0] == pytest.approx(0.0, abs=1e-15)
    assert b.cn_factor_apply(np.ones(2), 2 * t)[0] == pytest.approx(-1 / 3, rel=1e-14)
    with pytest.raises(ValueError):
        b.cn_factors(-1.0)


def test_fractional_power():
    b = ModeBasis(4)
    c = np.ones(4)
    np.testing.assert_array_equal(b.fractional_power_apply(c, 0.0), c)
    assert b.fractional_power_apply(c, 1.0)[0] == pytest.approx(math.pi**2, rel=1e-15)
    assert b.fractional_power_apply(c, -0.5)[3] == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    with pytest.raises(ValueError):
        b.fractional_power_apply(c, 2.5)


def test_lq_norm_pow():
    assert lq_norm_pow(np.zeros(9), 18) == 0.0
    for K in (1, 7, 256):
        assert lq_norm_pow(np.ones(K), 18) == pytest.approx(K / (K + 1), rel=1e-15)
    for q in (0, 3, -2, 2.5):
        with pytest.raises(ValueError):
            lq_norm_pow(np.ones(3), q)


def test_lq_norm_pow_matches_plain_power(rng):
    u = rng.standard_normal(100)
    for q in (2, 4, 6, 18):
        assert lq_norm_pow(u, q) == pytest.approx(np.sum(u**q) / 101, rel=1e-13)


def test_floor_grid_examples():
    assert floor_grid(0.0, 0.25) == 0.0
    assert floor_grid(0.3, 0.25) == 0.25
    assert floor_grid(0.25, 0.25) == 0.25
    # grid points are i * h in floating point; 3 * 0.1 exceeds 0.3
    assert floor_grid(3 * 0.1, 0.1) == 3 * 0.1
    assert floor_grid(0.3, 0.1) == 2 * 0.1


def test_time_grid_endpoint():
    for N in (3, 7, 10, 64, 1000):
        g = TimeGrid(1.0, N)
        assert g.time(N) == 1.0
        assert g.floor(1.0) == 1.0


@settings(max_examples=200, deadline=None)
@given(
    T=st.floats(0.1, 10.0),
    N=st.integers(1, 5000),
    frac=st.floats(0.0, 1.0, exclude_max=True),
)
def test_floor_property(T, N, frac):
    g = TimeGrid(T, N)
    t = frac * T
    f = g.floor(t)
    i = round(f / g.h)
    assert 0 <= i <= N
    assert f == g.time(i)
    assert f <= t < f + g.h * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(
    K=st.integers(1, 300),
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(1e-3, 1e3),
)
def test_transform_properties(K, seed, scale):
    c = np.random.default_rng(seed).standard_normal(K) * scale
    b = ModeBasis(K)
    u = b.to_grid(c)
    assert lq_norm_pow(u, 2) == pytest.approx(np.sum(c**2), rel=1e-12)
    np.testing.assert_allclose(b.to_spectral(u), c, rtol=0, atol=1e-12 * np.abs(c).max() * math.sqrt(K))


@settings(max_examples=60, deadline=None)
@given(K=st.integers(1, 64), t=st.floats(0.0, 10.0))
def test_operator_factor_ranges(K, t):
    b = ModeBasis(K)
    s = b.semigroup_factors(t)
    r = 1 / b.resolvent_denominators(t)
    num, den = b.cn_factors(t)
    assert np.all((0 <= s) & (s <= 1))
    assert np.all((0 < r) & (r <= 1))
    assert np.all(np.abs(num / den) <= 1)


def test_floor_just_below_horizon():
    g = TimeGrid(2.580078125, 39)
    t = 0.9999999999999998 * g.T
    f = g.floor(t)
    assert f <= t and f == g.time(38)
