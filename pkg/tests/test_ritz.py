import math

import numpy as np
import pytest

from robinplate import ball, ritz
from robinplate.ball import BallParams
from robinplate.domains import Domain2D
from robinplate.errors import BasisDegeneracyError, DomainError
from robinplate.profile import TrialProfile

DISK = Domain2D.disk()
ELLIPSE = Domain2D.ellipse_with_area(1.5)


@pytest.fixture(scope="module")
def disk_sys():
    return ritz.assemble(DISK, 1.0, -0.5, 12)


def test_legendre_table_orthonormal():
    x, w = np.polynomial.legendre.leggauss(30)
    P, D1, D2 = ritz.legendre_table(x, 8)
    np.testing.assert_allclose((P * w) @ P.T, np.eye(9), atol=1e-13)
    # derivatives against numpy's Legendre class
    for n in range(9):
        c = np.zeros(n + 1)
        c[n] = math.sqrt(n + 0.5)
        L = np.polynomial.Legendre(c)
        np.testing.assert_allclose(D1[n], L.deriv()(x), atol=1e-11)
        np.testing.assert_allclose(D2[n], L.deriv(2)(x), atol=1e-10)


def test_basis_size():
    assert len(ritz.basis_indices(12)) == 13 * 14 // 2


def test_assembled_forms(disk_sys):
    s = disk_sys
    for X in (s.A, s.mass, s.hessian, s.gradient, s.boundary):
        assert np.max(np.abs(X - X.T)) <= 1e-12 * np.max(np.abs(X))
    np.testing.assert_allclose(s.mass, np.eye(s.size), atol=1e-12)
    # first orthonormal function is the constant 1/sqrt(pi)
    assert s.boundary[0, 0] == pytest.approx(2.0, rel=1e-12)
    free = s.with_params(alpha=0.0).A
    assert np.max(np.abs(free[0])) <= 1e-10 * np.max(np.abs(free))


def test_disk_second_eigenvalue_against_determinant(disk_sys):
    ref = ball.second_eigenvalue(BallParams(2, 1.0, -0.5)).lam
    sol = ritz.solve(disk_sys, 3)
    lam2 = sol.eigenvalues[1]
    assert lam2 >= ref - 1e-9
    assert (lam2 - ref) / ref <= 1e-4
    # Lambda_2 is double on the disk
    assert sol.eigenvalues[2] == pytest.approx(lam2, rel=1e-8)


def test_disk_first_eigenvalue_against_negative_branch(disk_sys):
    ref = ball.first_eigenvalue(BallParams(2, 1.0, -0.5)).lam
    lam1 = ritz.solve(disk_sys, 1).eigenvalues[0]
    assert lam1 >= ref - 1e-9
    assert lam1 == pytest.approx(ref, rel=1e-8)


def test_eigenvectors_mass_orthonormal(disk_sys):
    sol = ritz.solve(disk_sys, 4)
    V = sol.vectors
    np.testing.assert_allclose(V.T @ disk_sys.mass @ V, np.eye(4), atol=1e-8)
    assert np.all(np.diff(sol.eigenvalues) >= 0)
    assert np.all(sol.residuals < 1e-8)


def test_free_plate_ground_state_is_zero():
    sol = ritz.solve(ritz.assemble(ELLIPSE, 2.0, 0.0, 10), 2)
    assert abs(sol.eigenvalues[0]) <= 1e-9


def test_ritz_values_decrease_with_degree():
    dom = Domain2D.perturbed(0.1, 3)
    vals = [ritz.solve(ritz.assemble(dom, 1.0, -0.4, n), 2).eigenvalues for n in (8, 10, 12)]
    for k in range(2):
        assert vals[0][k] >= vals[1][k] - 1e-10
        assert vals[1][k] >= vals[2][k] - 1e-10


@pytest.mark.parametrize("dom", [DISK, ELLIPSE], ids=["disk", "ellipse"])
@pytest.mark.parametrize("t", [0.5, 2.0])
def test_scaling_law(dom, t):
    tau, alpha = 1.0, -0.3
    big = ritz.solve(ritz.assemble(dom.scaled(t), tau, alpha, 12), 2).eigenvalues
    unit = ritz.solve(ritz.assemble(dom, t * t * tau, t ** 3 * alpha, 12), 2).eigenvalues
    np.testing.assert_allclose(big, unit / t ** 4, rtol=1e-3)


def test_sweep_is_continuous():
    alphas = np.linspace(-1.0, 0.0, 50)
    rows = np.array(ritz.sweep(ELLIPSE, 1.0, alphas, 10))
    lam2 = rows[:, 2]
    jumps = np.abs(np.diff(lam2))
    slope = np.median(jumps)
    assert np.all(jumps <= 10 * slope)
    assert np.all(np.diff(rows[:, 1]) > 0)


def test_assemble_errors():
    with pytest.raises(DomainError):
        ritz.assemble(DISK, 0.0, 0.0, 4)
    with pytest.raises(DomainError):
        ritz.assemble(DISK, 1.0, 0.0, 21)
    sys_ = ritz.assemble(DISK, 1.0, 0.0, 2)
    with pytest.raises(DomainError):
        ritz.solve(sys_, 7)


def test_degenerate_basis_reported():
    # a single radial point makes most of the basis indistinguishable
    sys_ = ritz.assemble(DISK, 1.0, 0.0, 6, n_r=1, n_theta=16)
    assert sys_.size < len(ritz.basis_indices(6))
    with pytest.raises(BasisDegeneracyError):
        ritz.solve(sys_, len(ritz.basis_indices(6)))


# --- isoperimetric comparison and Steklov ----------------------------------

def test_iso_disk_equality():
    res = ritz.isoperimetric_check(DISK, 1.0, -0.5)
    assert abs(res.margin) <= 1e-4 * res.lambda2_ball


def test_iso_ellipse_inequality():
    res = ritz.isoperimetric_check(ELLIPSE, 10.0, -2.0)
    assert res.margin >= 0


def test_iso_free_plate_perturbed():
    res = ritz.isoperimetric_check(Domain2D.perturbed(0.1, 3).with_area(math.pi), 1.0, 0.0)
    assert res.lambda2_domain <= res.lambda2_ball


def test_iso_alpha_range():
    with pytest.raises(DomainError):
        ritz.isoperimetric_check(DISK, 1.0, -1.5)
    with pytest.raises(DomainError):
        ritz.isoperimetric_check(DISK, 1.0, 0.1)


def test_ball_lambda2_scaling_route():
    p = BallParams(2, 1.0, -0.3)
    assert ritz.ball_lambda2(1.0, -0.3, 2.0) == pytest.approx(
        ball.second_eigenvalue_radius(p, 2.0), rel=1e-10)


def test_steklov():
    assert ritz.steklov_sigma2(DISK, 1.0) == pytest.approx(1.0, rel=1e-3)
    assert ritz.steklov_sigma2(ELLIPSE.with_area(math.pi), 5.0) <= 5.0 + 1e-3


def test_steklov_scaling():
    # zero of Lambda_2(2B; tau, .) sits at t^-3 times the zero for (B; t^2 tau)
    big = ritz.steklov_sigma2(Domain2D.disk(2.0), 1.0)
    small = ritz.steklov_sigma2(DISK, 4.0)
    assert big == pytest.approx(small / 8.0, rel=1e-3)
    assert big == pytest.approx(0.5, rel=1e-3)


# --- translation and summed numerators ---------------------------------------

def test_com_disk_and_ellipse():
    res = ritz.com_translation(DISK, 1.0, -0.5, 10)
    assert np.linalg.norm(res.point) <= 1e-8
    shifted = ELLIPSE.translated((0.25, -0.1))
    res = ritz.com_translation(shifted, 1.0, -0.5, 10)
    assert res.point == pytest.approx([0.25, -0.1], abs=1e-6)


def test_com_perturbed():
    dom = Domain2D.perturbed(0.05, 1).with_area(math.pi)
    res = ritz.com_translation(dom, 1.0, -0.5, 12)
    assert res.point[0] > 0.0
    integrals, scale = ritz.orthogonality_integrals(dom, 1.0, -0.5, res.point, 12)
    assert np.all(np.abs(integrals) <= 1e-6)


def test_sum_identity_on_disk_and_ellipse():
    t = TrialProfile.from_params(BallParams(2, 1.0, -0.5))
    assert ritz.weinberger_sum_identity(DISK, t) <= 1e-6
    terms = ritz.weinberger_terms(DISK, t)
    assert abs(terms.boundary_correction) <= 1e-12 * abs(terms.numerators)
    assert ritz.weinberger_sum_identity(ELLIPSE, t) <= 1e-6
    assert ritz.weinberger_sum_identity(ELLIPSE, t, (0.1, 0.05)) <= 1e-6


def test_sum_identity_free_plate_has_no_boundary_term():
    t = TrialProfile.from_params(BallParams(2, 1.0, 0.0))
    terms = ritz.weinberger_terms(ELLIPSE, t)
    assert terms.boundary_correction == 0.0
    assert terms.numerators == pytest.approx(terms.volume, rel=1e-6)
