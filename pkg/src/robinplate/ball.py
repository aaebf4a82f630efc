"""Spectrum of the Robin plate  Delta^2 u - tau Delta u = Lam u  on the unit ball.

Separated eigenfunctions are R(r) Y_l.  Writing the operator as
(Delta - s1)(Delta - s2) with s1 + s2 = tau and s1 s2 = -Lam, the regular radial
solutions are spanned by

    E_l(s; r) = sum_k c(k) s**k r**(2k+l)

for s = s1, s2 (E_l(-a^2; r) = j_l(ar)/a^l and E_l(b^2; r) = i_l(br)/b^l).
The two boundary conditions M_rad R = V_rad R = 0 at r = 1 give a 2x2
determinant.  For positive eigenvalues it is W_l(a) written with j_l and i_l;
for Lam <= 0 the determinant divided by (s2 - s1) is a real entire function of
Lam, which also covers the complex-conjugate pair (Lam < -tau^2/4) and the
repeated root (Lam = -tau^2/4).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import specfun
from .errors import BracketError, DomainError, OutOfRangeError
from .specfun import UltraIndex

SCAN_POINTS = 2000
# number of series terms used by the Lam-form determinant
_SYM_TERMS = 80


@dataclass(frozen=True)
class BallParams:
    d: int
    tau: float
    alpha: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tension must be positive, got {self.tau}")
        if not math.isfinite(self.alpha):
            raise DomainError("Robin parameter must be finite")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class RadialMode:
    """One eigenmode R(r) Y_l of the unit ball.

    ``a`` and ``b`` are the spectral parameters of the branch:

    * positive: R = j_l(ar) + gamma i_l(br), b^2 = a^2 + tau, lam = a^2 b^2
    * zero:     R = r^l + gamma i_l(br), a = 0, b = sqrt(tau)
    * negative: R = i_l(ar) + gamma i_l(br), a^2 + b^2 = tau, lam = -a^2 b^2;
      below lam = -tau^2/4 the pair (a, b) is complex conjugate and stored as
      complex numbers.
    """
    ell: int
    branch: str
    a: float | complex
    b: float | complex
    gamma: float | complex
    lam: float


def _is_close(x, y, scale):
    return abs(x - y) <= 1e-14 * max(1.0, abs(scale))


# --- radial boundary operators ---------------------------------------------

_KINDS = ("j", "i", "power", "linear")


def _profile_derivs(kind, idx: UltraIndex, k, r, upto):
    """R, R', ..., R^(upto) at radius r for the given radial profile."""
    if kind == "j":
        z = np.multiply(k, r)
        return [np.power(k, m) * specfun.ultra_j_deriv(idx, z, m) for m in range(upto + 1)]
    if kind == "i":
        z = np.multiply(k, r)
        return [np.power(k, m) * specfun.ultra_i_deriv(idx, z, m) for m in range(upto + 1)]
    if kind in ("power", "linear"):
        ell = 1 if kind == "linear" else idx.ell
        out = []
        for m in range(upto + 1):
            coef = 1
            for j in range(m):
                coef *= ell - j
            out.append(coef * r ** (ell - m) if coef else 0.0 * r)
        return out
    raise DomainError(f"unsupported profile kind {kind!r}; expected one of {_KINDS}")


def _check_kind(kind, idx):
    if kind not in _KINDS:
        raise DomainError(f"unsupported profile kind {kind!r}; expected one of {_KINDS}")
    if kind == "linear" and idx.ell != 1:
        raise DomainError("the linear profile r belongs to angular order l = 1")


def m_rad(kind: str, idx: UltraIndex, k=None, r: float = 1.0):
    """M_rad R = R''(r) for R = j_l(kr), i_l(kr), r^l or r."""
    _check_kind(kind, idx)
    return _profile_derivs(kind, idx, k, r, 2)[2]


def v_rad(kind: str, idx: UltraIndex, k, tau: float, alpha: float,
          r: float = 1.0, form: str = "generic"):
    """V_rad R at radius r.

    ``form="generic"`` differentiates the radial Laplacian directly (needs R''');
    ``form="reduced"`` uses that each profile is an eigenfunction of the radial
    Laplacian, which replaces the third-derivative term by a multiple of R'.
    """
    _check_kind(kind, idx)
    d, F = idx.d, (1 * (idx.d - 1) if kind == "linear" else idx.F)
    if form == "generic":
        R, R1, R2, R3 = _profile_derivs(kind, idx, k, r, 3)
        lap_prime = R3 + (d - 1) * (R2 / r - R1 / r ** 2) - F * (R1 / r ** 2 - 2 * R / r ** 3)
        return tau * R1 - lap_prime + F / r ** 2 * (R1 - R / r) + alpha * R
    if form == "reduced":
        R, R1 = _profile_derivs(kind, idx, k, r, 1)
        if kind == "j":
            shift = -np.square(k)
        elif kind == "i":
            shift = np.square(k)
        else:
            shift = 0.0
        return (tau - shift) * R1 + F / r ** 2 * (R1 - R / r) + alpha * R
    raise DomainError(f"unknown form {form!r}")


def W(ell: int, p: BallParams, a, radius: float = 1.0):
    """Boundary determinant for positive eigenvalues, b = sqrt(a^2 + tau)."""
    idx = UltraIndex(p.d, ell)
    a = np.asarray(a, dtype=float) if np.ndim(a) else float(a)
    if np.any(np.asarray(a) <= 0):
        raise DomainError("W needs a > 0")
    b = np.sqrt(np.square(a) + p.tau)
    mj = m_rad("j", idx, a, radius)
    mi = m_rad("i", idx, b, radius)
    vj = v_rad("j", idx, a, p.tau, p.alpha, radius, form="reduced")
    vi = v_rad("i", idx, b, p.tau, p.alpha, radius, form="reduced")
    return mj * vi - mi * vj


def _mv_coefficients(ell, p: BallParams):
    """Power-series coefficients in s of M_rad E_l(s) and V_rad E_l(s) at r = 1."""
    c = specfun.series_coefficients(UltraIndex(p.d, ell))[:_SYM_TERMS]
    K = len(c)
    n = 2 * np.arange(K) + ell
    F = ell * (ell + p.d - 2)
    m = np.zeros(K + 1)
    v = np.zeros(K + 1)
    m[:K] = c * n * (n - 1)
    v[:K] = c * (p.tau * n + F * (n - 1) + p.alpha)
    v[1:] -= c * n
    return m, v


def det_lambda(ell: int, p: BallParams, lam):
    """Real boundary determinant as a function of the eigenvalue.

    Equals [M E(s1) V E(s2) - M E(s2) V E(s1)] / (s2 - s1), expanded with the
    complete homogeneous polynomials h_n(s1, s2), which obey
    h_n = tau h_{n-1} + lam h_{n-2}.  Zeros are exactly the eigenvalues with
    angular order l.
    """
    m, v = _mv_coefficients(ell, p)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    K = len(m)
    P = -lam_arr
    h = np.empty((K, lam_arr.size))
    h[0] = 1.0
    if K > 1:
        h[1] = p.tau
    for j in range(2, K):
        h[j] = p.tau * h[j - 1] + lam_arr * h[j - 2]
    A = np.outer(m, v) - np.outer(v, m)
    total = np.zeros(lam_arr.size)
    Pj = np.ones(lam_arr.size)
    for j in range(K - 1):
        total += Pj * (A[j, j + 1:] @ h[: K - j - 1])
        Pj = Pj * P
    return total if np.ndim(lam) else float(total[0])


def _brackets(x, fx):
    s = np.sign(fx)
    out = []
    for i in range(len(x) - 1):
        if s[i] == 0:
            out.append((x[i], x[i]))
        elif s[i] * s[i + 1] < 0:
            out.append((x[i], x[i + 1]))
    if len(x) and s[-1] == 0:
        out.append((x[-1], x[-1]))
    return out


def _solve(f, lo, hi):
    if lo == hi:
        return lo
    return brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=200)


def _a_from_lambda(lam, tau):
    # positive root of a^4 + tau a^2 - lam = 0, written without cancellation
    return math.sqrt(2.0 * lam / (tau + math.sqrt(tau * tau + 4.0 * lam)))


def _positive_mode(ell, p, a):
    idx = UltraIndex(p.d, ell)
    b = math.sqrt(a * a + p.tau)
    gamma = -m_rad("j", idx, a) / m_rad("i", idx, b)
    return RadialMode(ell, "positive", a, b, float(gamma), a * a * b * b)


def _zero_mode(ell, p):
    return RadialMode(ell, "zero", 0.0, math.sqrt(p.tau), 0.0, 0.0)


def _negative_mode(ell, p, lam):
    disc = 0.25 * p.tau * p.tau + lam
    root = cmath.sqrt(disc)
    s1, s2 = 0.5 * p.tau - root, 0.5 * p.tau + root
    a, b = cmath.sqrt(s1), cmath.sqrt(s2)
    m, _ = _mv_coefficients(ell, p)
    m1 = np.polynomial.polynomial.polyval(s1, m)
    m2 = np.polynomial.polynomial.polyval(s2, m)
    gamma = complex(-(a ** ell * m1) / (b ** ell * m2)) if m2 != 0 else complex("nan")
    if disc >= 0:
        a, b, gamma = a.real, b.real, gamma.real
    return RadialMode(ell, "negative", a, b, gamma, lam)


def lambda_lower_bound(p: BallParams) -> float:
    """A bound Lam_1 >= -|alpha| d - alpha^2/tau valid for alpha <= 0.

    From the boundary identity  int_{dB} u^2 = int_B (d u^2 + 2 u x.grad u)
    and Young's inequality with weight tau/|alpha|.
    """
    if p.alpha >= 0:
        return 0.0
    return p.alpha * p.d - p.alpha ** 2 / p.tau


def negative_eigenvalues(ell: int, p: BallParams, points: int = SCAN_POINTS) -> list:
    """All eigenvalues Lam < 0 with angular order l, ascending."""
    lo = lambda_lower_bound(p)
    if lo >= 0:
        return []
    lo = 1.001 * lo
    grid = np.linspace(lo, 0.0, points + 1)[:-1]
    vals = det_lambda(ell, p, grid)
    f = lambda x: det_lambda(ell, p, x)
    return [_solve(f, x0, x1) for x0, x1 in _brackets(grid, vals)]


def _small_a_root(ell, p, a_first):
    """Root in (0, a_first) when the determinant changes sign before the first grid cell."""
    lam_hi = (a_first ** 2) * (a_first ** 2 + p.tau)
    f = lambda x: det_lambda(ell, p, x)
    f0 = f(0.0)
    if f0 == 0.0 or np.sign(f0) == np.sign(f(lam_hi)):
        return None
    lam = _solve(f, 0.0, lam_hi)
    return _a_from_lambda(lam, p.tau)


def positive_roots(ell: int, p: BallParams, a_max: float, step: float = 0.01) -> list:
    """Roots a in (0, a_max] of W_l, ascending."""
    n = max(SCAN_POINTS, int(math.ceil(a_max / step)))
    grid = a_max * np.arange(1, n + 1) / n
    vals = W(ell, p, grid)
    roots = []
    first = _small_a_root(ell, p, grid[0])
    if first is not None:
        roots.append(first)
    f = lambda x: W(ell, p, x)
    roots.extend(_solve(f, x0, x1) for x0, x1 in _brackets(grid, vals))
    return roots


# --- the two lowest eigenvalues ----------------------------------------------

def second_eigenvalue(p: BallParams) -> RadialMode:
    """Lam_2 of the unit ball for alpha in [-tau, 0].

    The mode has l = 1 and a in (0, p11); alpha = -tau gives the zero mode r Y_1.
    """
    return _second_eigenvalue(p.d, p.tau, p.alpha)


@lru_cache(maxsize=4096)
def _second_eigenvalue(d, tau, alpha):
    p = BallParams(d, tau, alpha)
    if _is_close(alpha, -tau, tau):
        return _zero_mode(1, p)
    if not (-tau < alpha <= 0):
        raise DomainError(
            f"second_eigenvalue needs alpha in [-tau, 0]; got tau={tau}, alpha={alpha}")
    top = specfun.p11(d)
    grid = top * np.arange(1, SCAN_POINTS + 1) / SCAN_POINTS
    vals = W(1, p, grid)
    if vals[0] >= 0:
        a = _small_a_root(1, p, grid[0])
        if a is None:
            raise BracketError("W_1 has no sign change near a = 0; "
                               "check that alpha lies in (-tau, 0]")
        return _positive_mode(1, p, a)
    up = np.nonzero(vals > 0)[0]
    if up.size == 0:
        raise BracketError(f"W_1 has no zero in (0, p11={top}); alpha outside (-tau, 0]?")
    k = up[0]
    a = _solve(lambda x: W(1, p, x), grid[k - 1], grid[k])
    return _positive_mode(1, p, a)


def first_eigenvalue(p: BallParams) -> RadialMode:
    """Lam_1 of the unit ball for alpha <= 0 (radial, negative for alpha < 0)."""
    if p.alpha > 0:
        raise DomainError("first_eigenvalue is implemented for alpha <= 0")
    if p.alpha == 0:
        return _zero_mode(0, p)
    roots = negative_eigenvalues(0, p)
    if not roots:
        raise BracketError(
            f"no radial eigenvalue found in [{1.001 * lambda_lower_bound(p)}, 0)")
    return _negative_mode(0, p, roots[0])


def spectrum(p: BallParams, ell_max: int = 3, count: int = 2) -> list:
    """The lowest ``count`` distinct modes with l <= ell_max, ascending.

    Each mode is listed once; its multiplicity is the dimension of the
    degree-l spherical harmonics.
    """
    if ell_max < 1 or count < 1:
        raise DomainError("spectrum needs ell_max >= 1 and count >= 1")
    fixed = []
    for ell in range(ell_max + 1):
        fixed.extend(_negative_mode(ell, p, lam) for lam in negative_eigenvalues(ell, p))
    if _is_close(p.alpha, 0.0, p.tau):
        fixed.append(_zero_mode(0, p))
    if _is_close(p.alpha, -p.tau, p.tau):
        fixed.append(_zero_mode(1, p))
    a_limit = math.sqrt(specfun.Z_MAX ** 2 - p.tau) if p.tau < specfun.Z_MAX ** 2 else 0.0
    a_cap = min(2.0 * specfun.p11(p.d), a_limit)
    # in (-tau, 0] the l = 1 root below p11 is unique; share it with second_eigenvalue
    # so both report bit-identical values
    canonical = second_eigenvalue(p) if -p.tau < p.alpha <= 0 else None
    top = specfun.p11(p.d)
    while True:
        modes = list(fixed)
        for ell in range(ell_max + 1):
            roots = positive_roots(ell, p, a_cap)
            if ell == 1 and canonical is not None and canonical.branch == "positive":
                below = [a for a in roots if a < top]
                if len(below) == 1 and abs(below[0] - canonical.a) <= 1e-10 * top:
                    roots = [canonical.a if a < top else a for a in roots]
            modes.extend(_positive_mode(ell, p, a) for a in roots)
        if len(modes) >= count:
            break
        if a_cap >= a_limit:
            raise OutOfRangeError(
                f"only {len(modes)} modes below the series limit Z_MAX={specfun.Z_MAX}")
        a_cap = min(2.0 * a_cap, a_limit)
    modes.sort(key=lambda m: (m.lam, m.ell))
    return modes[:count]


# --- scaled balls, membranes and Steklov -------------------------------------

def second_eigenvalue_radius(p: BallParams, radius: float) -> float:
    """Lam_2 on the ball of the given radius, from its own boundary determinant."""
    if radius <= 0:
        raise DomainError("radius must be positive")
    if _is_close(p.alpha, -p.tau / radius, p.tau):
        return 0.0
    top = specfun.p11(p.d) / radius
    grid = top * np.arange(1, SCAN_POINTS + 1) / SCAN_POINTS
    f = lambda x: W(1, p, x, radius=radius)
    vals = f(grid)
    up = np.nonzero(vals > 0)[0]
    if vals[0] >= 0 or up.size == 0:
        raise BracketError("no sign change of the radius-scaled W_1 on the scan grid")
    a = _solve(f, grid[up[0] - 1], grid[up[0]])
    return a * a * (a * a + p.tau)


def scaled_second_eigenvalue(p: BallParams, radius: float) -> float:
    """Lam_2 on the ball of the given radius via the scaling law."""
    unit = BallParams(p.d, p.tau * radius ** 2, p.alpha * radius ** 3)
    return second_eigenvalue(unit).lam / radius ** 4


def membrane_lambda2(d: int, alpha: float) -> float:
    """Second Robin membrane eigenvalue of the unit ball for alpha in [-1, 0].

    Smallest lam >= 0 with  sqrt(lam) j_1'(sqrt(lam)) + alpha j_1(sqrt(lam)) = 0.
    After dividing by sqrt(lam) the condition is the power series
    sum_k (-1)^k c_k (2k+1+alpha) lam^k in lam.
    """
    if not (-1.0 <= alpha <= 0.0):
        raise DomainError(f"membrane_lambda2 needs alpha in [-1, 0], got {alpha}")
    if alpha == -1.0:
        return 0.0
    top = specfun.p11(d)
    if alpha == 0.0:
        return top * top
    c = specfun.series_coefficients(UltraIndex(d, 1))
    k = np.arange(len(c))
    coef = (-1.0) ** k * c * (2 * k + 1 + alpha)
    f = lambda lam: np.polynomial.polynomial.polyval(lam, coef)
    return _solve(f, 0.0, top * top)


def steklov_sigma2_ball(d: int, tau: float) -> float:
    """sigma_2 of the unit ball, equal to tau.

    Cross-checked by solving for the Robin parameter at which the l = 1
    determinant vanishes at Lam = 0.
    """
    if not tau > 0:
        raise DomainError("tension must be positive")
    f = lambda alpha: det_lambda(1, BallParams(d, tau, alpha), 0.0)
    alpha_root = _solve(f, -2.0 * tau - 1.0, 0.0)
    if abs(alpha_root + tau) > 1e-10 * max(1.0, tau):
        raise ArithmeticError(
            f"Steklov root {-alpha_root} disagrees with the closed form {tau}")
    return float(tau)
