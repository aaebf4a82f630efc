"""Rayleigh-Ritz approximation of the Robin plate on planar domains.

Trial space: polynomials of total degree <= N, written as products of
Legendre polynomials in the bounding-box coordinates and orthonormalized
against the interior quadrature with a column-pivoted QR.  The quadratic form

    a(u, u) = int |D^2 u|^2 + tau |Du|^2 dx + alpha int_{dOmega} u^2 dS

is stored as three separate matrices so that tau and alpha can change without
reassembly.  Ritz values are upper bounds for the true eigenvalues (up to
quadrature error).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from . import ball
from .ball import BallParams
from .domains import (Domain2D, boundary_quadrature, interior_quadrature)
from .errors import (BasisDegeneracyError, BracketError, ConvergenceError,
                     DomainError, ZeroMeanGroundState)
from .profile import TrialProfile, N_of_rho

MAX_DEGREE = 20
DROP_TOL = 1e-12


def legendre_table(x, n):
    """P_0..P_n with first and second derivatives at x (orthonormal on [-1, 1])."""
    x = np.asarray(x, dtype=float)
    P = np.zeros((n + 1,) + x.shape)
    D1 = np.zeros_like(P)
    D2 = np.zeros_like(P)
    P[0] = 1.0
    if n >= 1:
        P[1] = x
        D1[1] = 1.0
    for k in range(1, n):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
        D1[k + 1] = D1[k - 1] + (2 * k + 1) * P[k]
        D2[k + 1] = D2[k - 1] + (2 * k + 1) * D1[k]
    norm = np.sqrt(np.arange(n + 1) + 0.5).reshape((-1,) + (1,) * x.ndim)
    return P * norm, D1 * norm, D2 * norm


def basis_indices(degree):
    return [(i, k - i) for k in range(degree + 1) for i in range(k + 1)]


@dataclass(frozen=True)
class PolynomialBasis:
    degree: int
    box: tuple

    def evaluate(self, x, y):
        """Values and derivatives (phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy), each (npts, M)."""
        (x0, x1), (y0, y1) = self.box
        hx, hy = 0.5 * (x1 - x0), 0.5 * (y1 - y0)
        xi = (np.asarray(x) - 0.5 * (x0 + x1)) / hx
        eta = (np.asarray(y) - 0.5 * (y0 + y1)) / hy
        Px, Dx, DDx = legendre_table(xi, self.degree)
        Py, Dy, DDy = legendre_table(eta, self.degree)
        idx = basis_indices(self.degree)
        I = [i for i, _ in idx]
        J = [j for _, j in idx]
        px, dx, ddx = Px[I].T, Dx[I].T / hx, DDx[I].T / hx ** 2
        py, dy, ddy = Py[J].T, Dy[J].T / hy, DDy[J].T / hy ** 2
        return (px * py, dx * py, px * dy, ddx * py, dx * dy, px * ddy)


@dataclass(frozen=True)
class RitzSystem:
    """Assembled quadratic forms in an orthonormalized polynomial basis.

    ``transform`` maps coefficients in the orthonormal basis back to the raw
    Legendre products (only the kept, pivoted columns).
    """
    domain: Domain2D
    degree: int
    tau: float
    alpha: float
    hessian: np.ndarray
    gradient: np.ndarray
    boundary: np.ndarray
    mass: np.ndarray
    basis: PolynomialBasis
    columns: np.ndarray
    transform: np.ndarray
    n_r: int
    n_theta: int

    @property
    def A(self) -> np.ndarray:
        return self.hessian + self.tau * self.gradient + self.alpha * self.boundary

    @property
    def size(self) -> int:
        return self.mass.shape[0]

    def with_params(self, tau=None, alpha=None) -> "RitzSystem":
        return replace(self, tau=self.tau if tau is None else float(tau),
                       alpha=self.alpha if alpha is None else float(alpha))

    def evaluate(self, coeffs, x, y, derivs=False):
        """Evaluate the function with orthonormal-basis coefficients at points."""
        raw = self.transform @ np.asarray(coeffs)
        vals = self.basis.evaluate(x, y)
        if not derivs:
            return vals[0][:, self.columns] @ raw
        return [v[:, self.columns] @ raw for v in vals]


@dataclass(frozen=True)
class RitzSolution:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    system: RitzSystem


def _quadrature_orders(degree, n_r, n_theta):
    return (n_r or 2 * degree + 4), (n_theta or max(16 * degree, 256))


def assemble(dom: Domain2D, tau: float, alpha: float, degree: int = 12,
             n_r: int | None = None, n_theta: int | None = None) -> RitzSystem:
    if not tau > 0:
        raise DomainError("tension must be positive")
    if int(degree) != degree or not 0 <= degree <= MAX_DEGREE:
        raise DomainError(f"degree must be an integer in 0..{MAX_DEGREE}")
    n_r, n_theta = _quadrature_orders(degree, n_r, n_theta)
    quad = interior_quadrature(dom, n_r, n_theta)
    area_q = float(np.sum(quad.w))
    if abs(area_q - dom.exact_area()) > 1e-10 * dom.exact_area():
        raise ConvergenceError(
            f"interior quadrature area {area_q} misses {dom.exact_area()}; "
            "increase the angular order")
    bq = boundary_quadrature(dom, n_theta)
    basis = PolynomialBasis(int(degree), dom.bounding_box())

    phi, px, py, pxx, pxy, pyy = basis.evaluate(quad.x, quad.y)
    sw = np.sqrt(quad.w)[:, None]
    Q, R, perm = scipy.linalg.qr(sw * phi, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    keep = int(np.sum(diag ** 2 > DROP_TOL * np.sum(diag ** 2)))
    cols = np.sort(perm[:keep])
    # re-factor the kept columns in natural order so the transform is triangular
    Q, R = np.linalg.qr(sw * phi[:, cols])
    T = scipy.linalg.solve_triangular(R, np.eye(keep))

    def orth(v):
        return v[:, cols] @ T

    ux, uy = orth(px), orth(py)
    uxx, uxy, uyy = orth(pxx), orth(pxy), orth(pyy)
    W = quad.w[:, None]
    H = uxx.T @ (W * uxx) + 2.0 * uxy.T @ (W * uxy) + uyy.T @ (W * uyy)
    G = ux.T @ (W * ux) + uy.T @ (W * uy)
    ub = basis.evaluate(bq.x, bq.y)[0][:, cols] @ T
    B = ub.T @ (bq.w[:, None] * ub)
    Mm = Q.T @ Q
    sym = lambda X: 0.5 * (X + X.T)
    return RitzSystem(dom, int(degree), float(tau), float(alpha), sym(H), sym(G), sym(B),
                      sym(Mm), basis, cols, T, n_r, n_theta)


def projected_forms(sys: RitzSystem, C):
    """Stiffness and mass matrices on span(C), from function values at the nodes.

    The entries are sums of products of point values, so they carry only a
    small relative error even when the full stiffness matrix has a large norm.
    """
    quad = interior_quadrature(sys.domain, sys.n_r, sys.n_theta)
    bq = boundary_quadrature(sys.domain, sys.n_theta)
    raw = sys.transform @ C
    u, ux, uy, uxx, uxy, uyy = [v[:, sys.columns] @ raw for v in sys.basis.evaluate(quad.x, quad.y)]
    ub = sys.basis.evaluate(bq.x, bq.y)[0][:, sys.columns] @ raw
    W = quad.w[:, None]
    K = (uxx.T @ (W * uxx) + 2.0 * uxy.T @ (W * uxy) + uyy.T @ (W * uyy)
         + sys.tau * (ux.T @ (W * ux) + uy.T @ (W * uy))
         + sys.alpha * ub.T @ (bq.w[:, None] * ub))
    Mk = u.T @ (W * u)
    return 0.5 * (K + K.T), 0.5 * (Mk + Mk.T)


def solve(sys: RitzSystem, k: int = 2, refine: bool = True) -> RitzSolution:
    """Lowest k Ritz pairs, ascending, mass-orthonormal eigenvectors.

    With ``refine`` the pairs are recomputed by a k-dimensional Rayleigh-Ritz
    step on the span of the first solve (see :func:`projected_forms`).
    """
    if not 1 <= k <= sys.size:
        if k > len(basis_indices(sys.degree)):
            raise DomainError(f"k={k} exceeds the basis size {len(basis_indices(sys.degree))}")
        raise BasisDegeneracyError(
            f"only {sys.size} basis functions survive the drop tolerance; "
            "lower the degree or refine the quadrature")
    A = sys.A
    vals, vecs = scipy.linalg.eigh(A, sys.mass, subset_by_index=[0, k - 1])
    if refine:
        K, Mk = projected_forms(sys, vecs)
        vals, Z = scipy.linalg.eigh(K, Mk)
        vecs = vecs @ Z
    res = np.linalg.norm(A @ vecs - sys.mass @ vecs * vals, axis=0)
    res = res / max(1.0, float(np.max(np.abs(vals))))
    return RitzSolution(vals, vecs, res, sys)


# --- isoperimetric comparison ---------------------------------------------

@dataclass(frozen=True)
class IsoResult:
    lambda2_domain: float
    lambda2_ball: float
    margin: float
    radius: float


def _alpha_range_check(alpha, tau, R):
    lo = -tau / R
    if alpha > 0 or alpha < lo * (1 + 1e-12):
        raise DomainError(f"alpha={alpha} outside the theorem range [{lo}, 0]")


def ball_lambda2(tau: float, alpha: float, radius: float) -> float:
    """Second eigenvalue of the disk of the given radius with the same (tau, alpha)."""
    alpha_unit = max(alpha * radius ** 3, -tau * radius ** 2)
    unit = BallParams(2, tau * radius ** 2, alpha_unit)
    return ball.second_eigenvalue(unit).lam / radius ** 4


def isoperimetric_check(dom: Domain2D, tau: float, alpha: float, degree: int = 12) -> IsoResult:
    R = dom.equal_area_radius
    _alpha_range_check(alpha, tau, R)
    lam = float(solve(assemble(dom, tau, alpha, degree), 2).eigenvalues[1])
    star = ball_lambda2(tau, alpha, R)
    return IsoResult(lam, star, star - lam, R)


def sweep(dom: Domain2D, tau: float, alphas, degree: int = 12):
    """Rows (alpha, Lambda_1, Lambda_2) along the given alpha values."""
    base = assemble(dom, tau, 0.0, degree)
    out = []
    for a in alphas:
        ev = solve(base.with_params(alpha=a), 2, refine=False).eigenvalues
        out.append((float(a), float(ev[0]), float(ev[1])))
    return out


def steklov_sigma2(dom: Domain2D, tau: float, degree: int = 12, iterations: int = 40) -> float:
    """Second biharmonic Steklov eigenvalue: minus the largest alpha with Lambda_2 = 0."""
    if not tau > 0:
        raise DomainError("tension must be positive")
    base = assemble(dom, tau, 0.0, degree)
    lam2 = lambda a: float(solve(base.with_params(alpha=a), 2, refine=False).eigenvalues[1])
    hi = 0.0
    if lam2(hi) <= 0:
        raise BracketError("Lambda_2 is not positive at alpha = 0; discretization too coarse")
    lo = -tau / dom.equal_area_radius
    for _ in range(60):
        if lam2(lo) < 0:
            break
        lo *= 1.5
    else:
        raise BracketError("no sign change of Lambda_2 in alpha")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if lam2(mid) < 0:
            lo = mid
        else:
            hi = mid
    return -0.5 * (lo + hi)


# --- translation making the trial functions orthogonal to the ground state --

@dataclass(frozen=True)
class ComResult:
    point: np.ndarray
    gradient: np.ndarray
    scale: float
    iterations: int


def _ground_state(sys: RitzSystem, quad):
    sol = solve(sys, 1, refine=False)
    v = sys.evaluate(sol.vectors[:, 0], quad.x, quad.y)
    mean = float(np.sum(quad.w * v))
    if abs(mean) <= 1e-8:
        raise ZeroMeanGroundState(
            "ground state has zero mean; the constant function is then an admissible "
            "trial function and Lambda_2 < 0")
    return v * math.copysign(1.0, mean)


def _com_derivatives(t: TrialProfile, quad, v, y):
    dx, dy = y[0] - quad.x, y[1] - quad.y
    r = np.hypot(dx, dy)
    r = np.where(r == 0, 1e-300, r)
    ex, ey = dx / r, dy / r
    rho = t.rho(r, 0)
    drho = t.rho(r, 1)
    wv = quad.w * v
    grad = np.array([np.sum(wv * rho * ex), np.sum(wv * rho * ey)])
    q = rho / r
    hess = np.array([
        [np.sum(wv * (drho * ex * ex + q * (1 - ex * ex))), np.sum(wv * (drho - q) * ex * ey)],
        [np.sum(wv * (drho - q) * ex * ey), np.sum(wv * (drho * ey * ey + q * (1 - ey * ey)))],
    ])
    scale = float(np.sum(quad.w * np.abs(v) * np.abs(rho)))
    return grad, hess, scale


def com_objective(t: TrialProfile, quad, v, y) -> float:
    r = np.hypot(y[0] - quad.x, y[1] - quad.y)
    return float(np.sum(quad.w * v * t.rho_integral(r)))


def com_translation(dom: Domain2D, tau: float, alpha: float, degree: int = 12,
                    tol: float = 1e-9, max_iter: int = 50, profile: TrialProfile | None = None):
    """Point y at which int rho(|x-y|) (x_k-y_k)/|x-y| v dx = 0 for k = 1, 2.

    Minimizes f(y) = int G(|y-x|) v dx (G' = rho) by damped Newton iteration
    from the centroid, using the analytic Hessian of f.
    """
    sys = assemble(dom, tau, alpha, degree)
    quad = interior_quadrature(dom, sys.n_r, sys.n_theta)
    v = _ground_state(sys, quad)
    if profile is None:
        profile = TrialProfile.from_params(BallParams(2, tau, alpha), dom.equal_area_radius)
    y = dom.centroid.copy()
    f = com_objective(profile, quad, v, y)
    for it in range(max_iter):
        g, Hm, scale = _com_derivatives(profile, quad, v, y)
        if np.linalg.norm(g) <= tol * max(1.0, scale):
            return ComResult(y, g, scale, it)
        try:
            step = -np.linalg.solve(Hm, g)
        except np.linalg.LinAlgError:
            step = -g
        lam = 1.0
        while lam > 1e-6:
            y_new = y + lam * step
            f_new = com_objective(profile, quad, v, y_new)
            if f_new <= f + 1e-15 * abs(f):
                break
            lam *= 0.5
        y, f = y_new, f_new
    g, _, scale = _com_derivatives(profile, quad, v, y)
    if np.linalg.norm(g) <= tol * max(1.0, scale):
        return ComResult(y, g, scale, max_iter)
    raise ConvergenceError(f"Newton iteration stalled with |grad f| = {np.linalg.norm(g)}")


def orthogonality_integrals(dom: Domain2D, tau: float, alpha: float, y, degree: int = 12,
                            profile: TrialProfile | None = None):
    """int rho(|x-y|) (x_k-y_k)/|x-y| v dx, k = 1, 2, with v the normalized ground state."""
    sys = assemble(dom, tau, alpha, degree)
    quad = interior_quadrature(dom, sys.n_r, sys.n_theta)
    v = _ground_state(sys, quad)
    if profile is None:
        profile = TrialProfile.from_params(BallParams(2, tau, alpha), dom.equal_area_radius)
    g, _, scale = _com_derivatives(profile, quad, v, np.asarray(y, dtype=float))
    return -g, scale


# --- summing the trial-function numerators ----------------------------------

@dataclass(frozen=True)
class SumIdentity:
    numerators: float
    volume: float
    boundary_correction: float
    residual: float


def _numerator_sum(t: TrialProfile, quad, bq, y):
    """Sum over k of int |D^2 u_k|^2 + tau |Du_k|^2 + alpha int u_k^2 dS, u_k = rho x_k/r."""
    X = np.stack([quad.x - y[0], quad.y - y[1]])
    r = np.hypot(X[0], X[1])
    p0, p1, p2 = t.rho(r, 0), t.rho(r, 1), t.rho(r, 2)
    g = p0 / r
    h = (r * p1 - p0) / r ** 3
    dh = p2 / r ** 2 - 3.0 * (r * p1 - p0) / r ** 4
    hess = 0.0
    grad = 0.0
    eye = np.eye(2)
    for k in range(2):
        for i in range(2):
            grad = grad + (h * X[i] * X[k] + g * eye[i, k]) ** 2
            for j in range(2):
                uij = (dh * X[i] * X[j] * X[k] / r
                       + h * (eye[i, j] * X[k] + eye[j, k] * X[i] + eye[i, k] * X[j]))
                hess = hess + uij ** 2
    vol = float(np.sum(quad.w * (hess + t.tau * grad)))
    rb = np.hypot(bq.x - y[0], bq.y - y[1])
    bdry = float(np.sum(bq.w * t.rho(rb, 0) ** 2))
    return vol + t.alpha * bdry


def weinberger_terms(dom: Domain2D, t: TrialProfile, y=(0.0, 0.0), n_r: int = 40,
                     n_theta: int = 512) -> SumIdentity:
    """Both sides of the summed-numerator identity, by separate quadratures.

    Summing the numerators of the trial functions rho x_k / r gives
    int N[rho] dx + alpha int rho^2 (1 - xhat . n) dS.  The boundary correction
    vanishes on balls centered at y and has the sign of alpha elsewhere.
    """
    if t.d != 2:
        raise DomainError("the planar identity needs a d = 2 profile")
    y = np.asarray(y, dtype=float)
    quad = interior_quadrature(dom, n_r, n_theta, center=y, split=t.radius)
    bq = boundary_quadrature(dom, n_theta)
    lhs = _numerator_sum(t, quad, bq, y)
    rq = np.hypot(quad.x - y[0], quad.y - y[1])
    volume = float(np.sum(quad.w * N_of_rho(t, rq)))
    dx, dy = bq.x - y[0], bq.y - y[1]
    rb = np.hypot(dx, dy)
    xn = (dx * bq.nx + dy * bq.ny) / rb
    corr = float(t.alpha * np.sum(bq.w * t.rho(rb, 0) ** 2 * (1.0 - xn)))
    rhs = volume + corr
    resid = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return SumIdentity(lhs, volume, corr, resid)


def weinberger_sum_identity(dom: Domain2D, t: TrialProfile, y=(0.0, 0.0)) -> float:
    """Relative residual of the summed-numerator identity."""
    return weinberger_terms(dom, t, y).residual
