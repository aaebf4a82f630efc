"""Ultraspherical Bessel functions of the first kind.

For dimension ``d`` and angular order ``l`` the functions

    j_l(z) = z**-s * J_{s+l}(z),   i_l(z) = z**-s * I_{s+l}(z),   s = (d-2)/2

are evaluated from their power series

    j_l(z) = sum_k (-1)**k c(k) z**(2k+l),   i_l(z) = sum_k c(k) z**(2k+l),

with c(0) = 2**(1-d/2-l) / Gamma(d/2+l) and the ratio recurrence
c(k+1)/c(k) = 1/(4 (k+1) (k+d/2+l)).  Derivatives are obtained term by term.
The direct series is only used for 0 <= z <= Z_MAX; beyond that the
alternating sum loses too many digits to be useful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, ConvergenceError, DomainError, OutOfRangeError

Z_MAX = 30.0
MAX_TERMS = 200
REL_STOP = 1e-17


@dataclass(frozen=True)
class UltraIndex:
    d: int
    ell: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise DomainError(f"angular order must be an integer >= 0, got {self.ell}")

    @property
    def s(self) -> float:
        return (self.d - 2) / 2.0

    @property
    def F(self) -> int:
        """Eigenvalue l(l+d-2) of minus the spherical Laplacian."""
        return self.ell * (self.ell + self.d - 2)


@lru_cache(maxsize=None)
def _coefficients(d: int, ell: int) -> tuple:
    c0 = 2.0 ** (1.0 - d / 2.0 - ell) / math.gamma(d / 2.0 + ell)
    out = [c0]
    k = 0
    while len(out) < MAX_TERMS:
        nxt = out[-1] / (4.0 * (k + 1) * (k + d / 2.0 + ell))
        if nxt == 0.0:
            break
        out.append(nxt)
        k += 1
    return tuple(out)


def series_coefficients(idx: UltraIndex, count: int | None = None) -> np.ndarray:
    """Unsigned coefficients c(k) of z**(2k+l) in j_l and i_l."""
    c = np.array(_coefficients(idx.d, idx.ell))
    if count is not None:
        if count > len(c):
            c = np.concatenate([c, np.zeros(count - len(c))])
        c = c[:count]
    return c


def c_k(d: int, k: int) -> float:
    """Series coefficient c_k of j_1 and i_1."""
    c = _coefficients(d, 1)
    return c[k] if k < len(c) else 0.0


def d_k(d: int, k: int) -> float:
    """Coefficient of z**(2k-1) in i_1'' (k >= 1)."""
    if k < 1:
        raise DomainError("d_k is defined for k >= 1")
    return (2 * k + 1) * 2.0 ** (1 - 2 * k - d / 2.0) / (
        math.factorial(k - 1) * math.gamma(k + 1 + d / 2.0))


def _falling(n: int, m: int) -> int:
    out = 1
    for j in range(m):
        out *= n - j
    return out


def _check_args(z, order):
    if order not in (0, 1, 2, 3, 4):
        raise DomainError(f"derivative order must be in 0..4, got {order}")
    zmin = np.min(z)
    zmax = np.max(z)
    if zmin < 0 or np.isnan(zmin):
        raise DomainError("argument must be nonnegative")
    if zmax > Z_MAX:
        raise OutOfRangeError(f"argument {zmax!r} outside supported interval [0, {Z_MAX}]")


def _series_scalar(c, ell, z, order, alternating):
    # Neumaier-compensated partial sums
    total = 0.0
    comp = 0.0
    for k, ck in enumerate(c):
        n = 2 * k + ell
        if n < order:
            continue
        term = ck * _falling(n, order) * z ** (n - order)
        if alternating and k % 2:
            term = -term
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        if k >= ell + 5 and abs(term) <= REL_STOP * abs(total + comp):
            return total + comp
    if z == 0.0:
        return total + comp
    raise ConvergenceError(f"series did not converge in {len(c)} terms at z={z}")


def _series_array(c, ell, z, order, alternating):
    total = np.zeros_like(z)
    comp = np.zeros_like(z)
    for k, ck in enumerate(c):
        n = 2 * k + ell
        if n < order:
            continue
        term = (ck * _falling(n, order)) * z ** (n - order)
        if alternating and k % 2:
            term = -term
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
        if k >= ell + 5 and np.all(np.abs(term) <= REL_STOP * np.abs(total + comp)):
            return total + comp
    if np.all(z == 0.0):
        return total + comp
    raise ConvergenceError(f"series did not converge in {len(c)} terms")


def _evaluate(idx: UltraIndex, z, order: int, alternating: bool):
    c = _coefficients(idx.d, idx.ell)
    if np.ndim(z) == 0:
        zf = float(z)
        _check_args(zf, order)
        return _series_scalar(c, idx.ell, zf, order, alternating)
    za = np.asarray(z, dtype=float)
    if za.size == 0:
        return za.copy()
    _check_args(za, order)
    return _series_array(c, idx.ell, za, order, alternating)


def ultra_j(idx: UltraIndex, z):
    return _evaluate(idx, z, 0, True)


def ultra_j_deriv(idx: UltraIndex, z, order: int):
    return _evaluate(idx, z, order, True)


def ultra_i(idx: UltraIndex, z):
    return _evaluate(idx, z, 0, False)


def ultra_i_deriv(idx: UltraIndex, z, order: int):
    return _evaluate(idx, z, order, False)


def first_derivative_zero(d: int, ell: int = 1, step: float = 0.05) -> float:
    """First positive zero of j_l'.

    The bracket scan runs up to sqrt(l(d+2l)) + 1, which encloses the
    Lorch-Szego upper bound for every d >= 2, l >= 1.
    """
    if ell < 1:
        raise DomainError("first_derivative_zero needs l >= 1 (j_0' vanishes at 0)")
    return _first_derivative_zero(int(d), int(ell), float(step))


@lru_cache(maxsize=None)
def _first_derivative_zero(d, ell, step):
    idx = UltraIndex(d, ell)
    upper = math.sqrt(ell * (d + 2 * ell)) + 1.0
    grid = np.arange(step, upper + step, step)
    vals = ultra_j_deriv(idx, grid, 1)
    sign_change = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if sign_change.size == 0:
        raise BracketError(f"no zero of j_{ell}' found on (0, {upper}) for d={d}")
    k = sign_change[0]
    return brentq(lambda z: ultra_j_deriv(idx, z, 1), grid[k], grid[k + 1],
                  xtol=1e-15, rtol=1e-14)


def p11(d: int) -> float:
    """First positive zero of j_1' in dimension d."""
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    return first_derivative_zero(int(d), 1)
