"""Radial trial profile built from the second ball eigenmode.

rho(r) = j_1(ar) + gamma i_1(br) on [0, 1], continued linearly with its value
and slope at r = 1.  The integrand N[rho] collects the Hessian, gradient and
boundary contributions of the d trial functions rho(r) x_k / r.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ball, specfun
from .ball import BallParams
from .errors import DomainError
from .specfun import UltraIndex


@dataclass(frozen=True)
class TrialProfile:
    """Profile of the unit-ball mode for (d, tau, alpha), optionally dilated.

    With ``radius`` R != 1 the profile is r -> rho_1(r/R), where rho_1 is
    built for the unit ball with parameters (R^2 tau, R^3 alpha).  This is the
    second eigenfunction profile of the ball of radius R with parameters
    (tau, alpha).
    """
    d: int
    tau: float
    alpha: float
    a: float
    b: float
    gamma: float
    radius: float = 1.0

    @classmethod
    def from_params(cls, p: BallParams, radius: float = 1.0) -> "TrialProfile":
        if radius <= 0:
            raise DomainError("radius must be positive")
        unit = BallParams(p.d, p.tau * radius ** 2, p.alpha * radius ** 3)
        mode = ball.second_eigenvalue(unit)
        if mode.branch != "positive":
            raise DomainError("trial profile needs alpha in (-tau/R, 0]; "
                              "at alpha = -tau/R the mode is the linear function")
        return cls(p.d, p.tau, p.alpha, mode.a, mode.b, mode.gamma, float(radius))

    @property
    def unit_tau(self) -> float:
        return self.tau * self.radius ** 2

    @property
    def unit_alpha(self) -> float:
        return self.alpha * self.radius ** 3

    @property
    def idx(self) -> UltraIndex:
        return UltraIndex(self.d, 1)

    def _inside(self, s, order):
        a, b = self.a, self.b
        return (a ** order * specfun.ultra_j_deriv(self.idx, a * s, order)
                + self.gamma * b ** order * specfun.ultra_i_deriv(self.idx, b * s, order))

    @property
    def edge(self):
        """R(1) and R'(1) of the unit profile."""
        return float(self._inside(1.0, 0)), float(self._inside(1.0, 1))

    def _unit_rho(self, s, order):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = s <= 1.0
        if np.any(inside):
            out[inside] = self._inside(s[inside], order)
        if np.any(~inside):
            R1, dR1 = self.edge
            so = s[~inside]
            if order == 0:
                out[~inside] = R1 + dR1 * (so - 1.0)
            elif order == 1:
                out[~inside] = dR1
        return out

    def rho(self, r, order: int = 0):
        """rho^(order)(r); orders 0..4 (orders >= 2 vanish beyond the radius)."""
        if order not in (0, 1, 2, 3, 4):
            raise DomainError(f"order must be in 0..4, got {order}")
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise DomainError("r must be nonnegative")
        out = self._unit_rho(r_arr / self.radius, order) / self.radius ** order
        return out if np.ndim(r) else float(out)

    def rho_integral(self, r):
        """G(r) = integral of rho from 0 to r."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise DomainError("r must be nonnegative")
        s = r_arr / self.radius
        idx0 = UltraIndex(self.d, 0)
        a, b = self.a, self.b
        j00 = specfun.ultra_j(idx0, 0.0)

        def inner(x):
            # j_0' = -j_1 and i_0' = i_1
            return ((j00 - specfun.ultra_j(idx0, a * x)) / a
                    + self.gamma * (specfun.ultra_i(idx0, b * x) - j00) / b)

        out = np.zeros_like(s)
        ins = s <= 1.0
        if np.any(ins):
            out[ins] = inner(s[ins])
        if np.any(~ins):
            R1, dR1 = self.edge
            t = s[~ins] - 1.0
            out[~ins] = inner(1.0) + R1 * t + 0.5 * dR1 * t * t
        out = out * self.radius
        return out if np.ndim(r) else float(out)


def v_rad_identity_residual(t: TrialProfile) -> float:
    """(alpha rho(1) + tau rho'(1)) - (a^3 j_2(a) + gamma b^3 i_2(b)) on the unit profile."""
    R1, dR1 = t.edge
    lhs = t.unit_alpha * R1 + t.unit_tau * dR1
    idx2 = UltraIndex(t.d, 2)
    rhs = (t.a ** 3 * specfun.ultra_j(idx2, t.a)
           + t.gamma * t.b ** 3 * specfun.ultra_i(idx2, t.b))
    return lhs - rhs


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("N[rho] is evaluated for r > 0 only")
    return r


def N_parts(t: TrialProfile, r):
    """(N1, N2, N3) with N = N1 + (d-1) N2 + N3."""
    r = _check_r(r)
    p0, p1, p2 = t.rho(r, 0), t.rho(r, 1), t.rho(r, 2)
    f = p0 - r * p1
    N1 = p2 ** 2
    N2 = 3.0 / r ** 4 * f ** 2 + t.tau * p0 ** 2 / r ** 2 + t.alpha * p0 ** 2 / r
    N3 = t.tau * p1 ** 2 + 2.0 * t.alpha * p0 * p1
    return N1, N2, N3


def N_of_rho(t: TrialProfile, r):
    """Radial integrand N[rho](r) obtained by summing the d Rayleigh numerators."""
    r = _check_r(r)
    d = t.d
    p0, p1, p2 = t.rho(r, 0), t.rho(r, 1), t.rho(r, 2)
    return (p2 ** 2 + 3.0 * (d - 1) / r ** 4 * (p0 - r * p1) ** 2
            + t.tau * (p1 ** 2 + (d - 1) / r ** 2 * p0 ** 2)
            + t.alpha * (2.0 * p0 * p1 + (d - 1) / r * p0 ** 2))


def outer_tail(t: TrialProfile, r):
    """(d-1) N2 + N3 for r >= radius, written with rho = A r + B."""
    A, B = _linear_coefficients(t)
    r = np.asarray(r, dtype=float)
    d, tau, al = t.d, t.tau, t.alpha
    return (3 * (d - 1) * B ** 2 / r ** 4 + tau * (d - 1) * B ** 2 / r ** 2
            + (d - 1) / r * (al * B ** 2 + 2 * A * B * tau)
            + d * (tau * A ** 2 + 2 * al * A * B) + (d + 1) * A ** 2 * al * r)


def outer_tail_derivative(t: TrialProfile, r):
    """Closed-form r-derivative of :func:`outer_tail`."""
    A, B = _linear_coefficients(t)
    r = np.asarray(r, dtype=float)
    d, tau, al = t.d, t.tau, t.alpha
    return (-12 * (d - 1) * B ** 2 / r ** 5 - 2 * tau * (d - 1) * B ** 2 / r ** 3
            - (d - 1) / r ** 2 * (al * B ** 2 + 2 * A * B * tau) + (d + 1) * A ** 2 * al)


def _linear_coefficients(t: TrialProfile):
    R = t.radius
    rho_R = t.rho(R, 0)
    A = t.rho(R, 1)
    return A, rho_R - A * R


def nice_lhs(t: TrialProfile, r):
    """(tau+alpha-3a^2/(d+2)) j_1(ar) + gamma (tau+alpha+3b^2/(d+2)) i_1(br), r in (0, 1]."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r > 1):
        raise DomainError("r must lie in (0, 1]")
    d, ta = t.d, t.unit_tau + t.unit_alpha
    j = specfun.ultra_j(t.idx, t.a * r)
    i = specfun.ultra_i(t.idx, t.b * r)
    return (ta - 3 * t.a ** 2 / (d + 2)) * j + t.gamma * (ta + 3 * t.b ** 2 / (d + 2)) * i


def profile_table(t: TrialProfile, r):
    """Rows (r, rho, rho', rho'', N, N1, N2, N3) for plotting."""
    r = _check_r(r)
    N1, N2, N3 = N_parts(t, r)
    return np.column_stack([r, t.rho(r, 0), t.rho(r, 1), t.rho(r, 2),
                            N_of_rho(t, r), N1, N2, N3])
