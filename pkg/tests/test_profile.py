import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robinplate import specfun
from robinplate.ball import BallParams
from robinplate.errors import DomainError
from robinplate.profile import (TrialProfile, N_of_rho, N_parts, nice_lhs, outer_tail,
                                outer_tail_derivative, profile_table, v_rad_identity_residual)

params = st.tuples(st.sampled_from([2, 3, 4, 5, 8]), st.floats(0.01, 100.0),
                   st.floats(0.01, 0.99)).map(lambda t: BallParams(t[0], t[1], -t[1] * t[2]))


@pytest.fixture(scope="module")
def prof():
    return TrialProfile.from_params(BallParams(2, 1.0, -0.5))


def test_continuity_at_the_edge(prof):
    eps = 1e-12
    assert prof.rho(1.0 - eps) == pytest.approx(prof.rho(1.0 + eps), abs=1e-11)
    inside = prof._inside(1.0, 1)
    assert float(inside) == pytest.approx(prof.rho(1.0 + 1e-9, 1), abs=1e-12)
    assert abs(prof.rho(1.0, 2)) < 1e-11


def test_second_derivative_vanishes_outside(prof):
    r = np.linspace(1.01, 9, 50)
    assert np.all(prof.rho(r, 2) == 0.0)
    assert np.all(prof.rho(r, 3) == 0.0)


def test_derivatives_by_finite_differences(prof):
    r = np.linspace(0.05, 0.95, 19)
    h = 1e-5
    for order in (1, 2):
        fd = (prof.rho(r + h, order - 1) - prof.rho(r - h, order - 1)) / (2 * h)
        np.testing.assert_allclose(fd, prof.rho(r, order), rtol=1e-7, atol=1e-9)


def test_integral_of_profile(prof):
    from scipy.integrate import quad
    for r in (0.3, 1.0, 2.5):
        ref, _ = quad(prof.rho, 0.0, r, epsabs=1e-14, epsrel=1e-13, points=[1.0] if r > 1 else None)
        assert prof.rho_integral(r) == pytest.approx(ref, rel=1e-11)


def test_signs_on_grid(prof):
    r = np.linspace(0, 3, 500)
    assert np.all(prof.rho(r, 2) <= 1e-12)
    assert np.all(prof.rho(r) >= -1e-12)
    assert np.all(prof.rho(r, 1) >= -1e-12)


@pytest.mark.parametrize("p", [BallParams(2, 1.0, -0.3), BallParams(3, 10.0, -5.0)])
def test_boundary_identity_examples(p):
    t = TrialProfile.from_params(p)
    assert abs(v_rad_identity_residual(t)) < 1e-10
    R1, dR1 = t.edge
    assert p.alpha * R1 + p.tau * dR1 > 0


@settings(max_examples=50, deadline=None)
@given(p=params)
def test_profile_properties(p):
    t = TrialProfile.from_params(p)
    r = np.linspace(0, 10, 400)
    p0, p1, p2 = t.rho(r), t.rho(r, 1), t.rho(r, 2)
    tol = lambda v: 1e-12 * (1 + np.max(np.abs(v)))
    assert np.all(p0 >= -tol(p0)) and np.all(p1 >= -tol(p1)) and np.all(p2 <= tol(p2))
    f = p0 - r * p1
    assert np.all(f >= -tol(f)) and np.all(np.diff(f) >= -tol(f))
    g = p.alpha * p0 + p.tau * p1
    assert np.all(np.diff(g) <= tol(g))
    assert np.all(g[r <= 1] > 0)
    R1, dR1 = t.edge
    assert abs(v_rad_identity_residual(t)) <= 1e-10 * (1 + abs(p.alpha * R1) + abs(p.tau * dR1))


def test_dilated_profile_is_rescaled_unit_profile():
    p = BallParams(2, 1.0, -0.3)
    t = TrialProfile.from_params(p, radius=1.7)
    unit = TrialProfile.from_params(BallParams(2, 1.0 * 1.7 ** 2, -0.3 * 1.7 ** 3))
    r = np.linspace(0.1, 4, 13)
    np.testing.assert_allclose(t.rho(r), unit.rho(r / 1.7), rtol=1e-14)
    np.testing.assert_allclose(t.rho(r, 1), unit.rho(r / 1.7, 1) / 1.7, rtol=1e-14)


def test_profile_at_endpoint_rejected():
    with pytest.raises(DomainError):
        TrialProfile.from_params(BallParams(2, 1.0, -1.0))
    with pytest.raises(DomainError):
        TrialProfile.from_params(BallParams(2, 1.0, -0.5), radius=0)


# --- N[rho] -----------------------------------------------------------------------

def test_recomposition(prof):
    r = np.array([0.7])
    N1, N2, N3 = N_parts(prof, r)
    assert float((N1 + (2 - 1) * N2 + N3)[0]) == pytest.approx(float(N_of_rho(prof, r)[0]), abs=1e-12)


def test_small_r_term_vanishes(prof):
    r = 1e-3
    f = prof.rho(r) - r * prof.rho(r, 1)
    scale = float(np.max(np.abs(N_of_rho(prof, np.linspace(0.01, 1, 50)))))
    assert 3 / r ** 4 * f ** 2 < 1e-6 * scale


def test_hessian_part_zero_outside(prof):
    N1, _, _ = N_parts(prof, np.linspace(1.001, 10, 40))
    assert np.all(N1 == 0.0)


def test_N_domain_error(prof):
    with pytest.raises(DomainError):
        N_of_rho(prof, np.array([0.0, 0.5]))
    with pytest.raises(DomainError):
        N_parts(prof, 0.0)


@settings(max_examples=30, deadline=None)
@given(p=params)
def test_outer_tail_forms(p):
    t = TrialProfile.from_params(p)
    r = np.linspace(1.0, 10.0, 200)
    _, N2, N3 = N_parts(t, r)
    tail = outer_tail(t, r)
    assert np.max(np.abs((p.d - 1) * N2 + N3 - tail)) <= 1e-9 * (1 + np.max(np.abs(N3)))
    der = outer_tail_derivative(t, r)
    assert np.all(der <= 1e-12 * (1 + np.max(np.abs(der))))


def test_nice_lhs(prof):
    r = np.linspace(0.01, 1, 100)
    assert np.all(nice_lhs(prof, r) > 0)
    assert abs(nice_lhs(prof, 1e-9)) < 1e-8
    with pytest.raises(DomainError):
        nice_lhs(prof, 1.5)


def test_nice_lhs_trivial_case():
    # tau + alpha - 3a^2/(d+2) >= 0 makes every factor nonnegative
    t = TrialProfile.from_params(BallParams(2, 50.0, -1.0))
    d, ta = 2, t.tau + t.alpha
    assert ta - 3 * t.a ** 2 / (d + 2) >= 0
    assert np.all(nice_lhs(t, np.linspace(0.01, 1, 50)) >= 0)


def test_profile_table_columns(prof):
    rows = profile_table(prof, np.array([0.5, 2.0]))
    assert rows.shape == (2, 8)
    assert rows[1, 3] == 0.0
    assert rows[0, 4] == pytest.approx(rows[0, 5] + rows[0, 6] + rows[0, 7], rel=1e-14)


def test_profile_uses_second_mode():
    p = BallParams(3, 2.0, -0.7)
    t = TrialProfile.from_params(p)
    idx = specfun.UltraIndex(3, 1)
    r = 0.4
    assert t.rho(r) == pytest.approx(specfun.ultra_j(idx, t.a * r)
                                     + t.gamma * specfun.ultra_i(idx, t.b * r), rel=1e-14)
    assert t.b == pytest.approx(math.sqrt(t.a ** 2 + 2.0), rel=1e-14)
