import csv
import math
from pathlib import Path

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings, strategies as st

from robinplate import specfun
from robinplate.errors import DomainError, OutOfRangeError
from robinplate.specfun import UltraIndex

DATA = Path(__file__).parent / "data" / "ultra_values.csv"


def scipy_j(d, ell, z):
    s = (d - 2) / 2
    return z ** (-s) * sc.jv(s + ell, z)


def scipy_i(d, ell, z):
    s = (d - 2) / 2
    return z ** (-s) * sc.iv(s + ell, z)


# --- closed forms and fixed values ----------------------------------------

def test_zero_argument_vanishes_for_positive_order():
    assert specfun.ultra_j(UltraIndex(2, 1), 0.0) == 0.0
    assert specfun.ultra_i(UltraIndex(2, 1), 0.0) == 0.0
    assert specfun.ultra_j_deriv(UltraIndex(2, 1), 0.0, 2) == 0.0


def test_d3_order0_matches_sine_over_z():
    # s = 1/2: j_0(z) = sqrt(2/pi) sin(z)/z
    idx = UltraIndex(3, 0)
    assert abs(specfun.ultra_j(idx, math.pi)) < 1e-12
    for z in (0.3, 1.0, 2.5, 7.0):
        assert specfun.ultra_j(idx, z) == pytest.approx(math.sqrt(2 / math.pi) * math.sin(z) / z,
                                                        rel=1e-12, abs=1e-14)


def test_d3_order0_modified_matches_sinh_over_z():
    idx = UltraIndex(3, 0)
    assert specfun.ultra_i(idx, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0),
                                                      rel=1e-12)


def test_first_zero_of_bessel_j1_by_independent_bisection():
    idx = UltraIndex(2, 1)
    lo, hi = 3.5, 4.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if specfun.ultra_j(idx, lo) * specfun.ultra_j(idx, mid) <= 0:
            hi = mid
        else:
            lo = mid
    assert 0.5 * (lo + hi) == pytest.approx(3.8317059702, abs=1e-8)
    assert abs(specfun.ultra_j(idx, 3.8317059702)) < 1e-8


def test_derivative_recurrences_at_fixed_points():
    j1, j2 = UltraIndex(3, 1), UltraIndex(3, 2)
    lhs = specfun.ultra_j_deriv(j1, 1.0, 1)
    assert lhs == pytest.approx(specfun.ultra_j(j1, 1.0) - specfun.ultra_j(j2, 1.0), abs=1e-13)
    i1, i2 = UltraIndex(4, 1), UltraIndex(4, 2)
    lhs = specfun.ultra_i_deriv(i1, 2.0, 1)
    assert lhs - (specfun.ultra_i(i1, 2.0) / 2.0 + specfun.ultra_i(i2, 2.0)) == pytest.approx(
        0.0, abs=1e-13)


def test_j1_prime_positive_at_one():
    assert specfun.ultra_j_deriv(UltraIndex(2, 1), 1.0, 1) > 0


def test_order_zero_derivative_is_the_function():
    idx = UltraIndex(5, 2)
    z = np.linspace(0, 10, 37)
    np.testing.assert_array_equal(specfun.ultra_j_deriv(idx, z, 0), specfun.ultra_j(idx, z))
    np.testing.assert_array_equal(specfun.ultra_i_deriv(idx, z, 0), specfun.ultra_i(idx, z))


def test_fixture_table_from_high_precision_oracle():
    rows = list(csv.DictReader(DATA.open()))
    assert len(rows) == 280
    for row in rows:
        idx = UltraIndex(int(row["d"]), int(row["ell"]))
        f = specfun.ultra_j if row["kind"] == "j" else specfun.ultra_i
        got = f(idx, float(row["z"]))
        ref = float(row["value"])
        assert abs(got - ref) <= float(row["tolerance"]) * max(1.0, abs(ref)), row


@pytest.mark.parametrize("d", [2, 3, 4, 7, 10])
@pytest.mark.parametrize("ell", [0, 1, 2, 3])
def test_against_scipy_bessel(d, ell):
    z = np.linspace(0.05, 8.0, 60)
    idx = UltraIndex(d, ell)
    np.testing.assert_allclose(specfun.ultra_j(idx, z), scipy_j(d, ell, z), rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(specfun.ultra_i(idx, z), scipy_i(d, ell, z), rtol=1e-12)


def test_scalar_and_array_paths_agree():
    idx = UltraIndex(4, 1)
    z = np.linspace(0, 12, 25)
    arr = specfun.ultra_j_deriv(idx, z, 3)
    for zi, v in zip(z, arr):
        assert specfun.ultra_j_deriv(idx, float(zi), 3) == pytest.approx(v, rel=1e-13, abs=1e-13)


# --- coefficients ------------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 9])
def test_leading_coefficient_from_gamma(d):
    # exact factorial / double factorial forms of Gamma(d/2 + l)
    for ell in range(4):
        n = d + 2 * ell  # Gamma(n/2)
        if n % 2 == 0:
            g = math.factorial(n // 2 - 1)
        else:
            g = math.sqrt(math.pi) * math.prod(range(1, n - 1, 2)) / 2 ** ((n - 1) // 2)
        c0 = 2.0 ** (1 - d / 2 - ell) / g
        assert specfun.series_coefficients(UltraIndex(d, ell), 1)[0] == pytest.approx(c0, rel=1e-14)


def test_coefficient_ratio():
    c = specfun.series_coefficients(UltraIndex(5, 2), 30)
    k = np.arange(29)
    np.testing.assert_allclose(c[1:] / c[:-1], 1.0 / (4 * (k + 1) * (k + 2.5 + 2)), rtol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4, 8])
def test_d_k_matches_second_derivative_series(d):
    # j_1''(z) = sum_k (-1)^k d_k z^(2k-1)
    z = 0.37
    total = sum((-1) ** k * specfun.d_k(d, k) * z ** (2 * k - 1) for k in range(1, 30))
    assert total == pytest.approx(specfun.ultra_j_deriv(UltraIndex(d, 1), z, 2), rel=1e-13)
    assert specfun.d_k(d, 2) / specfun.d_k(d, 1) == pytest.approx(5 / (6 * (d + 4)), rel=1e-14)


# --- p11 -------------------------------------------------------------------------

def test_p11_values():
    assert specfun.p11(2) == pytest.approx(1.8412, abs=1e-3)
    assert specfun.p11(3) == pytest.approx(2.0816, abs=1e-3)
    # d = 2 is the first zero of J_1'
    assert specfun.p11(2) == pytest.approx(sc.jnp_zeros(1, 1)[0], rel=1e-12)


@pytest.mark.parametrize("d", range(2, 13))
def test_p11_bracket(d):
    p2 = specfun.p11(d) ** 2
    assert d < p2 < d + 2


# --- recurrences and finite differences, as properties -------------------------

@settings(max_examples=150, deadline=None)
@given(d=st.integers(2, 12), ell=st.integers(1, 4), z=st.floats(0.05, 15.0))
def test_three_term_recurrences(d, ell, z):
    jm, j0, jp = (specfun.ultra_j(UltraIndex(d, l), z) for l in (ell - 1, ell, ell + 1))
    im, i0, ip = (specfun.ultra_i(UltraIndex(d, l), z) for l in (ell - 1, ell, ell + 1))
    k = (d - 2 + 2 * ell) / z
    jscale = 1.0 + abs(k * j0) + abs(jm) + abs(jp)
    iscale = 1.0 + abs(k * i0) + abs(im) + abs(ip)
    # the j series is accurate to about eps times i_l(z), which is the sum of |terms|
    jtol = 1e-12 * jscale + 64 * 2.0 ** -52 * iscale
    assert abs(k * j0 - jm - jp) <= jtol
    assert abs(k * i0 - im + ip) <= 1e-12 * iscale


@settings(max_examples=100, deadline=None)
@given(d=st.integers(2, 12), ell=st.integers(1, 4), z=st.floats(0.05, 15.0))
def test_lowering_recurrences(d, ell, z):
    idx, low = UltraIndex(d, ell), UltraIndex(d, ell - 1)
    jp = specfun.ultra_j_deriv(idx, z, 1)
    ip = specfun.ultra_i_deriv(idx, z, 1)
    j0, i0 = specfun.ultra_j(idx, z), specfun.ultra_i(idx, z)
    iscale = 1.0 + abs(specfun.ultra_i(low, z)) + abs(i0) * (1 + (ell + d - 2) / z)
    assert abs(jp - (specfun.ultra_j(low, z) - (ell + d - 2) / z * j0)) <= 64 * 2.0 ** -52 * iscale * 10
    assert abs(ip - (specfun.ultra_i(low, z) - (ell + d - 2) / z * i0)) <= 1e-12 * iscale


@pytest.mark.parametrize("d", [2, 3, 5, 8])
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivatives_against_central_differences(d, order):
    idx = UltraIndex(d, 1)
    z = np.linspace(0.1, math.sqrt(d + 2), 40)
    h = 1e-6 if order == 1 else 1e-4
    for f, df in ((specfun.ultra_j, specfun.ultra_j_deriv), (specfun.ultra_i, specfun.ultra_i_deriv)):
        lower = (lambda x: f(idx, x)) if order == 1 else (lambda x: df(idx, x, order - 1))
        fd = (lower(z + h) - lower(z - h)) / (2 * h)
        exact = df(idx, z, order)
        np.testing.assert_allclose(fd, exact, rtol=1e-6, atol=1e-7)


# --- errors ----------------------------------------------------------------------

def test_argument_checks():
    idx = UltraIndex(2, 1)
    with pytest.raises(OutOfRangeError, match="30"):
        specfun.ultra_j(idx, 30.5)
    with pytest.raises(DomainError):
        specfun.ultra_i(idx, -1e-3)
    with pytest.raises(DomainError):
        specfun.ultra_j_deriv(idx, 1.0, 5)
    with pytest.raises(DomainError):
        specfun.ultra_j(idx, np.array([1.0, np.nan]))
    with pytest.raises(DomainError):
        UltraIndex(1, 0)
    with pytest.raises(DomainError):
        UltraIndex(2, -1)
