import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grfields.exceptions import DomainError
from grfields.specfun import (
    bessel_i,
    bessel_k,
    bessel_k_oracle,
    bessel_k_scaled,
    bessel_k_series,
    gamma_fn,
    gegenbauer,
    gegenbauer_all,
    gegenbauer_at_one,
    log_bessel_k,
)

# K_nu(z) to 17 digits, computed once with mpmath at 30 digits and frozen.
K_TABLE = [
    (0.0, 0.01, 4.7212447301610949),
    (0.0, 1.0, 0.42102443824070833),
    (0.3, 0.5, 0.97647412438178792),
    (1.0, 2.0, 0.13986588181652243),
    (1.3, 2.0, 0.16082436361104642),
    (2.0, 3.0, 0.061510458471742038),
    (2.5, 10.0, 2.3931325864627889e-5),
    (3.7, 0.2, 10412.791636449135),
    (5.0, 20.0, 1.0538660139974233e-9),
    (4.0, 0.05, 7678400.2499479826),
    (0.999999, 1.5, 0.27738765791990628),
    (7.5, 40.0, 1.6777669959833176e-18),
]


def test_gamma_values():
    assert gamma_fn(1.0) == 1.0
    assert gamma_fn(5.0) == 24.0
    assert gamma_fn(0.5) == pytest.approx(1.7724538509055160, rel=1e-14)


def test_gamma_half_matches_quadrature():
    from scipy import integrate

    val, _ = integrate.quad(lambda t: t**-0.5 * math.exp(-t), 0, math.inf)
    assert gamma_fn(0.5) == pytest.approx(val, rel=1e-10)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def test_bessel_i_values():
    assert bessel_i(0, 1e-300) == 1.0
    assert bessel_i(1, 1.0) == pytest.approx(0.5651591039924850, rel=1e-14)
    assert bessel_i(0.5, 2.0) == pytest.approx(math.sqrt(2 / (math.pi * 2.0)) * math.sinh(2.0), rel=1e-12)
    assert bessel_i(-2, 1.0) == pytest.approx(bessel_i(2, 1.0), rel=1e-14)


@pytest.mark.parametrize("z", [0.0, -1.0])
def test_bessel_rejects_nonpositive_argument(z):
    with pytest.raises(DomainError):
        bessel_i(1.0, z)
    with pytest.raises(DomainError):
        bessel_k(1.0, z)


@pytest.mark.parametrize("nu, z, expected", K_TABLE)
def test_bessel_k_frozen_table(nu, z, expected):
    assert bessel_k(nu, z) == pytest.approx(expected, rel=1e-13)


def test_bessel_k_half_integer_closed_form():
    assert bessel_k(0.5, 1.0) == pytest.approx(0.4610685044478946, rel=1e-14)
    for z in (0.1, 1.0, 5.0, 25.0):
        closed = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
        assert bessel_k(0.5, z) == pytest.approx(closed, rel=1e-13)
        assert bessel_k(1.5, z) == pytest.approx(closed * (1 + 1 / z), rel=1e-13)


def test_bessel_k_log_singularity():
    z = 1e-4
    assert abs(bessel_k(0, z) / math.log(1 / z) - 1) < 0.05


def test_bessel_k_small_argument_power_law():
    # K_nu(z) ~ Gamma(nu) 2^(nu-1) z^-nu
    nu, z = 1.7, 1e-6
    assert bessel_k(nu, z) == pytest.approx(math.gamma(nu) * 2 ** (nu - 1) * z**-nu, rel=1e-4)


def test_bessel_k_overflow_is_explicit():
    with pytest.raises(OverflowError):
        bessel_k(200.0, 1e-3)


def test_bessel_k_underflow_to_zero():
    assert bessel_k(0.5, 800.0) == 0.0
    assert log_bessel_k(0.5, 800.0) == pytest.approx(0.5 * math.log(math.pi / 1600.0) - 800.0, rel=1e-14)


def test_scaled_consistent():
    for nu, z, _ in K_TABLE:
        assert bessel_k_scaled(nu, z) * math.exp(-z) == pytest.approx(bessel_k(nu, z), rel=1e-14)


def test_bessel_k_array_argument():
    z = np.array([0.5, 1.0, 2.0])
    np.testing.assert_array_equal(bessel_k(1.2, z), [bessel_k(1.2, float(x)) for x in z])


def test_series_route_agrees_away_from_integers():
    for nu, z, expected in K_TABLE:
        if z <= 5 and abs(nu - round(nu)) > 0.1:
            assert bessel_k_series(nu, z) == pytest.approx(expected, rel=1e-9)


def test_series_route_integer_orders_via_averaging():
    for nu, z, expected in K_TABLE:
        if z <= 3 and nu == round(nu):
            assert bessel_k_series(nu, z) == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("nu, z", [(0.5, 1.0), (2.0, 3.0), (0.0, 0.01), (4.2, 17.0), (5.0, 0.01)])
def test_oracle_agrees(nu, z):
    assert bessel_k_oracle(nu, z) == pytest.approx(bessel_k(nu, z), rel=1e-9)


def test_oracle_symmetric_and_closed_form():
    assert bessel_k_oracle(0.5, 1.0) == pytest.approx(0.4610685044478946, abs=1e-9)
    assert bessel_k_oracle(-2.0, 3.0) == bessel_k_oracle(2.0, 3.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5, allow_nan=False), st.floats(1e-3, 20.0))
def test_bessel_k_symmetry_exact(nu, z):
    assert bessel_k(nu, z) == bessel_k(-nu, z)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 5), st.lists(st.floats(0.01, 30.0), min_size=2, max_size=8, unique=True))
def test_bessel_k_decreasing(nu, zs):
    zs = sorted(zs)
    vals = [bessel_k(nu, z) for z in zs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def _gegenbauer_explicit(n, lam, u):
    # explicit sum over (lam)_(n-k) (2u)^(n-2k) / (k! (n-2k)!), in exact rational arithmetic;
    # independent of the recurrence
    lam, u = Fraction(lam), Fraction(u)
    total = Fraction(0)
    for k in range(n // 2 + 1):
        rising = Fraction(1)
        for i in range(n - k):
            rising *= lam + i
        total += (-1) ** k * rising / (math.factorial(k) * math.factorial(n - 2 * k)) * (2 * u) ** (n - 2 * k)
    return float(total)


def test_gegenbauer_low_degrees():
    assert gegenbauer(0, 2.3, -0.4) == 1.0
    assert gegenbauer(1, 0.5, 0.3) == pytest.approx(0.3, abs=1e-15)


def test_gegenbauer_degree_four_expansion():
    rng = np.random.default_rng(7)
    for u in rng.uniform(-1, 1, 20):
        assert gegenbauer(4, 1.5, u) == pytest.approx(_gegenbauer_explicit(4, 1.5, u), abs=1e-12)


@pytest.mark.parametrize("n, lam", [(7, 0.5), (12, 2.0), (20, 1.0)])
def test_gegenbauer_matches_explicit_sum(n, lam):
    for u in (-0.9, -0.2, 0.35, 1.0):
        assert gegenbauer(n, lam, u) == pytest.approx(_gegenbauer_explicit(n, lam, u), rel=1e-10, abs=1e-10)


def test_gegenbauer_at_one_closed_form():
    # P_n^lam(1) = Gamma(n + 2 lam) / (n! Gamma(2 lam))
    for n, lam in [(0, 1.0), (3, 0.5), (10, 1.5), (25, 2.0)]:
        expected = math.gamma(n + 2 * lam) / (math.factorial(n) * math.gamma(2 * lam))
        assert gegenbauer_at_one(n, lam) == pytest.approx(expected, rel=1e-12)
        assert gegenbauer(n, lam, 1.0) == pytest.approx(expected, rel=1e-12)


def test_gegenbauer_domain():
    with pytest.raises(DomainError):
        gegenbauer(2, 1.0, 1.5)


def test_gegenbauer_all_matches_pointwise():
    table = gegenbauer_all(10, 1.5, 0.3)
    for n in range(11):
        assert table[n] == pytest.approx(gegenbauer(n, 1.5, 0.3), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 50), st.sampled_from([0.5, 1.0, 1.5, 2.0]), st.floats(-1, 1))
def test_gegenbauer_bounded_by_value_at_one(n, lam, u):
    assert abs(gegenbauer(n, lam, u)) <= gegenbauer_at_one(n, lam) * (1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 50), st.sampled_from([0.5, 1.0, 1.5, 2.0]), st.floats(-1, 1))
def test_gegenbauer_recurrence_residual(n, lam, u):
    p2, p1, p0 = gegenbauer(n, lam, u), gegenbauer(n - 1, lam, u), gegenbauer(n - 2, lam, u)
    resid = n * p2 - 2 * u * (n + lam - 1) * p1 + (n + 2 * lam - 2) * p0
    scale = max(abs(n * p2), abs(2 * u * (n + lam - 1) * p1), abs((n + 2 * lam - 2) * p0), 1.0)
    assert abs(resid) <= 1e-10 * scale
