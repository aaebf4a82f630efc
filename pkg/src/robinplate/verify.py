"""Grid verification of the inequalities behind the ball-maximizer argument.

Every check reduces to signed margins (>= 0 means the statement holds at that
sample).  A report keeps the smallest margin with its witness; ties are broken
lexicographically on the witness parameters so reports are deterministic
regardless of thread scheduling.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import ball, specfun
from .ball import BallParams
from .errors import DomainError
from .profile import (TrialProfile, N_of_rho, N_parts, nice_lhs, outer_tail, outer_tail_derivative,
                      v_rad_identity_residual)
from .specfun import UltraIndex

DEFAULT_FRACTIONS = (0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)


@dataclass(frozen=True)
class GridSpec:
    dims: tuple = (2, 3, 4, 5, 8)
    tau_min: float = 1e-2
    tau_max: float = 1e2
    tau_count: int = 13
    tau_scale: str = "log"
    alpha_fractions: tuple = DEFAULT_FRACTIONS
    r_count: int = 200
    membrane_dims: tuple = (2, 3, 4, 5, 6)
    membrane_alpha_count: int = 50
    lorch_dims: tuple = tuple(range(2, 13))
    x_count: int = 200

    def __post_init__(self):
        for name in ("dims", "alpha_fractions", "membrane_dims", "lorch_dims"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.dims or not self.alpha_fractions or self.tau_count < 1:
            raise DomainError("empty parameter grid")
        if any(int(d) != d or d < 2 for d in self.dims + self.membrane_dims + self.lorch_dims):
            raise DomainError("dimensions must be integers >= 2")
        if any(not 0 < f < 1 for f in self.alpha_fractions):
            raise DomainError("alpha fractions must lie strictly between 0 and 1")
        if not 0 < self.tau_min <= self.tau_max:
            raise DomainError("need 0 < tau_min <= tau_max")
        if self.tau_count == 1 and self.tau_min != self.tau_max:
            raise DomainError("a single tau point needs tau_min == tau_max")
        if self.tau_scale not in ("log", "linear"):
            raise DomainError("tau_scale must be 'log' or 'linear'")
        if self.r_count < 2 or self.membrane_alpha_count < 2 or self.x_count < 2:
            raise DomainError("r, membrane-alpha and x counts must be >= 2")

    @classmethod
    def from_dict(cls, raw: dict) -> "GridSpec":
        names = {f.name for f in fields(cls)}
        unknown = set(raw) - names
        if unknown:
            raise DomainError(f"unknown grid keys: {sorted(unknown)}")
        return cls(**raw)

    def taus(self):
        if self.tau_count == 1:
            return [float(self.tau_min)]
        if self.tau_scale == "log":
            return [float(t) for t in np.logspace(math.log10(self.tau_min),
                                                  math.log10(self.tau_max), self.tau_count)]
        return [float(t) for t in np.linspace(self.tau_min, self.tau_max, self.tau_count)]

    def ball_points(self):
        return [(int(d), tau, -tau * f) for d in self.dims for tau in self.taus()
                for f in self.alpha_fractions]

    def membrane_points(self):
        alphas = np.linspace(-1.0, 0.0, self.membrane_alpha_count)
        return [(int(d), float(a)) for d in self.membrane_dims for a in alphas]

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass
class VerificationReport:
    lemma: str
    grid_points: int
    filtered: int
    min_margin: float
    witness: dict
    passed: bool
    tolerance: float
    details: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_json(self) -> str:
        obj = {"lemma": self.lemma, "grid_points": self.grid_points, "filtered": self.filtered,
               "min_margin": self.min_margin, "witness": self.witness, "pass": self.passed,
               "tolerance": self.tolerance, "details": self.details, "grid": self.grid}
        return json.dumps(obj, sort_keys=True, allow_nan=True)


def _threads():
    raw = os.environ.get("ROBINPLATE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, min(n, 32))


def _map(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _key(witness):
    return tuple(witness[k] for k in sorted(witness))


def _report(lemma, results, tolerance, grid, details=None, started=None):
    """Reduce per-point results [(margins or None, extra)] to a report.

    Each point yields None when its hypotheses exclude it, otherwise a list of
    (margin, witness) pairs.
    """
    filtered = sum(1 for r in results if r is None)
    best = None
    for res in results:
        if res is None:
            continue
        for margin, witness in res:
            cand = (float(margin), _key(witness), witness)
            if best is None or cand[:2] < best[:2]:
                best = cand
    if best is None:
        margin, witness = math.inf, {}
    else:
        margin, _, witness = best
    passed = bool(margin >= -tolerance)
    elapsed = time.perf_counter() - started if started is not None else 0.0
    return VerificationReport(lemma, len(results), filtered, margin, witness, passed,
                              tolerance, details or {}, grid, elapsed)


def _w(d, tau=None, alpha=None, **extra):
    out = {"d": int(d)}
    if tau is not None:
        out["tau"] = float(tau)
    if alpha is not None:
        out["alpha"] = float(alpha)
    out.update({k: float(v) for k, v in extra.items()})
    return out


def _min_at(values, grid, name="r"):
    i = int(np.argmin(values))
    return float(values[i]), {name: float(grid[i])}


# --- special-function facts --------------------------------------------------

def lorch_szego_point(d, grid: GridSpec):
    p2 = specfun.p11(d) ** 2
    return [(p2 - d, _w(d, side=0)), (d + 2 - p2, _w(d, side=1))]


def verify_lorch_szego(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda d: lorch_szego_point(d, grid), grid.lorch_dims)
    return _report("lorch_szego", res, 1e-10, {"dims": list(grid.lorch_dims)}, started=t0)


def _normalized(values):
    scale = float(np.max(np.abs(values))) if np.size(values) else 0.0
    return np.asarray(values) / (1.0 + scale)


def bessel_point(d, grid: GridSpec):
    """Signed margins for the low-order j/i facts on (0, p11]."""
    n = grid.r_count
    idx1, idx2, idx3 = UltraIndex(d, 1), UltraIndex(d, 2), UltraIndex(d, 3)
    top = specfun.p11(d)
    z = top * np.arange(1, n + 1) / n
    inner = z[:-1]
    out = []

    def add(name, vals, zz):
        m = _normalized(vals)
        i = int(np.argmin(m))
        out.append((float(m[i]), _w(d, z=zz[i], check=_CHECK_IDS[name])))

    add("j1_pos", specfun.ultra_j(idx1, z), z)
    add("j2_pos", specfun.ultra_j(idx2, z), z)
    add("j3_pos", specfun.ultra_j(idx3, z), z)
    add("j1pp_neg", -specfun.ultra_j_deriv(idx1, z, 2), z)
    add("j1pppp_pos", specfun.ultra_j_deriv(idx1, z, 4), z)
    add("j1p_pos", specfun.ultra_j_deriv(idx1, inner, 1), inner)
    for ell in (1, 2, 3):
        pl = specfun.first_derivative_zero(d, ell)
        zz = pl * np.arange(1, n) / n
        idx = UltraIndex(d, ell)
        q = zz * specfun.ultra_j_deriv(idx, zz, 1) / specfun.ultra_j(idx, zz)
        add(f"log_deriv_pos_{ell}", q, zz)
        add(f"log_deriv_decr_{ell}", -np.diff(q), zz[:-1])
    d1, d2 = specfun.d_k(d, 1), specfun.d_k(d, 2)
    zj = math.sqrt(3 * (d + 2) / (d + 5)) * np.arange(0, n + 1) / n
    add("j1pp_poly", -d1 * zj + d2 * zj ** 3 - specfun.ultra_j_deriv(idx1, zj, 2), zj)
    zi = math.sqrt(3.0) * np.arange(0, n + 1) / n
    add("i1pp_poly", d1 * zi + 1.2 * d2 * zi ** 3 - specfun.ultra_i_deriv(idx1, zi, 2), zi)
    # a/b > j_1(ar)/i_1(br), relative to a/b, and the r -> 0 limit
    r = np.arange(1, n + 1) / n
    worst, wit, lim_err = math.inf, None, 0.0
    for a in top * np.arange(1, 11) / 10:
        for b in np.logspace(-2, math.log10(20.0), 10):
            ratio = specfun.ultra_j(idx1, a * r) / specfun.ultra_i(idx1, b * r)
            m = 1.0 - ratio * b / a
            i = int(np.argmin(m))
            if m[i] < worst:
                worst, wit = float(m[i]), (a, b, r[i])
            small = (specfun.ultra_j(idx1, a * 1e-4) / specfun.ultra_i(idx1, b * 1e-4)) * b / a
            lim_err = max(lim_err, abs(small - 1.0))
    out.append((worst, _w(d, a=wit[0], b=wit[1], r=wit[2], check=_CHECK_IDS["ratio"])))
    out.append((1e-6 - lim_err, _w(d, check=_CHECK_IDS["ratio_limit"])))
    return out


_CHECK_NAMES = ["j1_pos", "j2_pos", "j3_pos", "j1pp_neg", "j1pppp_pos", "j1p_pos",
                "log_deriv_pos_1", "log_deriv_decr_1", "log_deriv_pos_2", "log_deriv_decr_2",
                "log_deriv_pos_3", "log_deriv_decr_3", "j1pp_poly", "i1pp_poly",
                "ratio", "ratio_limit"]
_CHECK_IDS = {name: i for i, name in enumerate(_CHECK_NAMES)}


def verify_bessel_properties(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda d: bessel_point(d, grid), grid.dims)
    return _report("bessel_properties", res, 1e-12, {"dims": list(grid.dims)},
                   {"checks": _CHECK_NAMES}, started=t0)


# --- membrane and ball eigenvalues ------------------------------------------

def membrane_point(d, alpha, grid: GridSpec):
    lam = ball.membrane_lambda2(d, alpha)
    out = [(lam - d * (1 + alpha), _w(d, alpha=alpha))]
    if alpha == 0.0:
        p2 = specfun.p11(d) ** 2
        out.append((1e-10 - abs(lam - p2), _w(d, alpha=alpha, neumann=1)))
    return out


def verify_membrane_bound(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: membrane_point(*pt, grid), grid.membrane_points())
    return _report("membrane_bound", res, 1e-12,
                   {"dims": list(grid.membrane_dims), "alpha_count": grid.membrane_alpha_count},
                   started=t0)


def _ball_grid_meta(grid):
    return {"dims": list(grid.dims), "tau": [grid.tau_min, grid.tau_max, grid.tau_count,
                                            grid.tau_scale],
            "alpha_fractions": list(grid.alpha_fractions)}


def w1_limit(p: BallParams) -> float:
    """Limit of W_1(a)/(ab) as a -> 0+."""
    c = specfun.series_coefficients(UltraIndex(p.d, 1))
    k = np.arange(1, len(c))
    s = float(np.sum(c[1:] * (2 * k + 1) * (2 * k) * p.tau ** k))
    return -c[0] * (p.tau + p.alpha) * s


def w1_point(d, tau, alpha, grid: GridSpec):
    p = BallParams(d, tau, alpha)
    top = specfun.p11(d)
    small = float(ball.W(1, p, 1e-3 * top))
    large = float(ball.W(1, p, top))
    a = 1e-4
    ratio = float(ball.W(1, p, a)) / (a * math.sqrt(a * a + tau))
    lim = w1_limit(p)
    rel = abs(ratio - lim) / abs(lim)
    w = _w(d, tau, alpha)
    return [(-math.copysign(1.0, small) if small != 0 else 0.0, dict(w, check=0)),
            (math.copysign(1.0, large) if large != 0 else 0.0, dict(w, check=1)),
            (1e-3 - rel, dict(w, check=2))]


def verify_w1_sign(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: w1_point(*pt, grid), grid.ball_points())
    return _report("w1_sign", res, 0.0, _ball_grid_meta(grid),
                   {"checks": ["W1(1e-3 p11) < 0", "W1(p11) > 0", "small-a limit within 1e-3"]},
                   started=t0)


def bounds_point(d, tau, alpha, grid: GridSpec):
    lam = ball.second_eigenvalue(BallParams(d, tau, alpha)).lam
    ta = tau + alpha
    return [(min(lam - d * ta, (d + 2) * ta - lam), _w(d, tau, alpha))]


def verify_bounds_lemma(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: bounds_point(*pt, grid), grid.ball_points())
    return _report("lambda2_bounds", res, 1e-9, _ball_grid_meta(grid), started=t0)


def atb_margins(d, tau, alpha):
    """Lower-bound margins and, when a^2 < d, upper-bound margins (scaled by 1 + tau)."""
    m = ball.second_eigenvalue(BallParams(d, tau, alpha))
    x = m.a ** 2
    b2 = m.b ** 2
    s = 1.0 + tau
    lower = [(tau + alpha - x * (x - alpha) / (d + 2 - x)) / s,
             (tau - (x * x - (d + 2) * alpha) / (d + 2 - x)) / s,
             (b2 - (d + 2) * (x - alpha) / (d + 2 - x)) / s]
    upper = None
    if x < d:
        upper = [(x * (x - alpha) / (d - x) - (tau + alpha)) / s,
                 ((x * x - d * alpha) / (d - x) - tau) / s,
                 (d * (x - alpha) / (d - x) - b2) / s]
    return lower, upper


def atb_point(d, tau, alpha, grid: GridSpec):
    lower, upper = atb_margins(d, tau, alpha)
    w = _w(d, tau, alpha)
    out = [(v, dict(w, bound=i)) for i, v in enumerate(lower)]
    if upper is not None:
        out += [(v, dict(w, bound=3 + i)) for i, v in enumerate(upper)]
    return out


def verify_atb_bounds(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    pts = grid.ball_points()
    res = _map(lambda pt: atb_point(*pt, grid), pts)
    skipped = sum(1 for r in res if len(r) == 3)
    return _report("atb_bounds", res, 1e-9, _ball_grid_meta(grid),
                   {"upper_bounds_skipped": skipped,
                    "bounds": ["tau+alpha lower", "tau lower", "b^2 lower",
                               "tau+alpha upper", "tau upper", "b^2 upper"]},
                   started=t0)


# --- large / small tau + alpha ------------------------------------------------

def large_ta_hypothesis(d, tau, alpha, a2):
    return a2 > (3 + alpha) * (d + 2) / (d + 5) or tau + alpha > 3 * (3 + alpha) / (d + 5)


def large_ta_point(d, tau, alpha, grid: GridSpec):
    a2 = ball.second_eigenvalue(BallParams(d, tau, alpha)).a ** 2
    if not large_ta_hypothesis(d, tau, alpha, a2):
        return None
    return [(tau + alpha - 3 * a2 / (d + 2), _w(d, tau, alpha))]


def verify_largeta(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: large_ta_point(*pt, grid), grid.ball_points())
    return _report("large_ta", res, 1e-12, _ball_grid_meta(grid), started=t0)


def gamma_lower_bound(d, alpha, a, b):
    """Lower bound for gamma built from the series coefficients of i_1''."""
    x = a * a
    c = specfun.d_k(d, 2) / specfun.d_k(d, 1)
    b2_upper = d * (x - alpha) / (d - x)
    return (a / b) ** 3 * (1 - c * x) / (1 + 1.2 * c * b2_upper)


def gamma_lower_bound_closed(d, alpha, a, b):
    x = a * a
    return (a / b) ** 3 * (6 * (d + 4) - 5 * x) * (d - x) / (6 * d * (d + 4 - alpha) - 24 * x)


def gamma_star(d, alpha, a, b):
    x = a * a
    num = 3 * (d + 2 - x) - (d + 2) * (x - alpha)
    den = x * (d - x) * (d + 2) / d + 3 * (d + 2 - x)
    return (a / b) ** 3 * num / den


def _small_ta_mode(d, tau, alpha):
    m = ball.second_eigenvalue(BallParams(d, tau, alpha))
    a2 = m.a ** 2
    if a2 <= (3 + alpha) * (d + 2) / (d + 5) and tau + alpha <= 3 * (3 + alpha) / (d + 5):
        return m
    return None


def small_ta_nice_point(d, tau, alpha, grid: GridSpec):
    m = _small_ta_mode(d, tau, alpha)
    if m is None:
        return None
    t = TrialProfile.from_params(BallParams(d, tau, alpha))
    r = np.arange(1, grid.r_count + 1) / grid.r_count
    ta = tau + alpha
    j = specfun.ultra_j(t.idx, t.a * r)
    i = specfun.ultra_i(t.idx, t.b * r)
    c1, c2 = ta - 3 * t.a ** 2 / (d + 2), t.gamma * (ta + 3 * t.b ** 2 / (d + 2))
    vals = nice_lhs(t, r) / (abs(c1) * j + abs(c2) * i)
    v, extra = _min_at(vals, r)
    return [(v, _w(d, tau, alpha, **extra))]


def small_ta_gamma_lb_point(d, tau, alpha, grid: GridSpec):
    m = _small_ta_mode(d, tau, alpha)
    if m is None:
        return None
    lb = gamma_lower_bound(d, alpha, m.a, m.b)
    return [((m.gamma - lb) / m.gamma, _w(d, tau, alpha))]


def small_ta_gamma_star_point(d, tau, alpha, grid: GridSpec):
    m = _small_ta_mode(d, tau, alpha)
    if m is None:
        return None
    lb = gamma_lower_bound(d, alpha, m.a, m.b)
    return [((lb - gamma_star(d, alpha, m.a, m.b)) / (m.a / m.b) ** 3, _w(d, tau, alpha))]


def small_ta_ranges_point(d, tau, alpha, grid: GridSpec):
    m = _small_ta_mode(d, tau, alpha)
    if m is None:
        return None
    w = _w(d, tau, alpha)
    return [(d - m.a ** 2, dict(w, check=0)), (3 - m.b ** 2, dict(w, check=1))]


def _verify_small(name, fn, grid, tol, details=None):
    t0 = time.perf_counter()
    res = _map(lambda pt: fn(*pt, grid), grid.ball_points())
    meta = dict(_ball_grid_meta(grid), r_count=grid.r_count)
    return _report(name, res, tol, meta, details, started=t0)


def verify_smallta(grid: GridSpec = GridSpec()) -> list:
    """Three (plus one range) sub-reports on the small tau + alpha sub-grid."""
    c_num = specfun.d_k(2, 2) / specfun.d_k(2, 1)
    return [
        _verify_small("small_ta_nice", small_ta_nice_point, grid, 1e-12),
        _verify_small("small_ta_gamma_lb", small_ta_gamma_lb_point, grid, 1e-12,
                      {"c_d2": c_num}),
        _verify_small("small_ta_gamma_star", small_ta_gamma_star_point, grid, 1e-12),
        _verify_small("small_ta_ranges", small_ta_ranges_point, grid, 1e-12,
                      {"checks": ["a^2 < d", "b^2 <= 3"]}),
    ]


# --- the quartic p_alpha --------------------------------------------------------

def p_alpha(d, alpha, x):
    """Expanded quartic (coefficients as printed)."""
    return (-5 * (d + 2) * x ** 4 + (16 * d * d + 41 * d + 48) * x ** 3
            - d * (17 * d * d + 58 * d + 114) * x ** 2
            + 3 * d * (4 * d ** 3 + (13 - 2 * alpha) * d * d + 2 * (5 - alpha) * d + 16 * alpha) * x
            - 6 * alpha * d * d * (d + 2) * (d + 1 - alpha))


def p_alpha_product(d, alpha, x):
    """d times the numerator of gamma_LB - gamma*, before expansion."""
    return ((6 * (d + 4) - 5 * x) * (d - x) * (x * (d - x) * (d + 2) + 3 * d * (d + 2 - x))
            - d * (3 * (d + 2 - x) - (d + 2) * (x - alpha)) * (6 * d * (d + 4 - alpha) - 24 * x))


def q_alpha(d, alpha, x):
    """Derivative of p_alpha in alpha."""
    return 3 * d * (-2 * d * d - 2 * d + 16) * x - 6 * d * d * (d + 2) * (d + 1) \
        + 12 * alpha * d * d * (d + 2)


def P_poly(d, x):
    return (-5 * (d + 2) * x ** 3 + (16 * d * d + 41 * d + 48) * x ** 2
            - d * (17 * d * d + 58 * d + 114) * x + 3 * d * d * (d + 2) * (4 * d + 5))


def polynomial_point(d, tau, alpha, grid: GridSpec):
    if _small_ta_mode(d, tau, alpha) is None:
        return None
    n = grid.x_count
    x = d * np.arange(1, n) / n
    w = _w(d, tau, alpha)
    pv = p_alpha(d, alpha, x)
    prod = p_alpha_product(d, alpha, x)
    expand = float(np.max(np.abs(pv - prod) / np.maximum(np.abs(prod), 1.0)))
    out = []
    v, extra = _min_at(pv / x / (1 + np.max(np.abs(pv / x))), x, "x")
    out.append((v, dict(w, check=0, **extra)))
    q = q_alpha(d, alpha, x)
    v, extra = _min_at(-q / (1 + np.max(np.abs(q))), x, "x")
    out.append((v, dict(w, check=1, **extra)))
    out.append((1e-9 - expand, dict(w, check=2)))
    return out


def polynomial_static(d, grid: GridSpec):
    """Checks depending on d only: P > 0 on [0, d], P(d) formula, q_0 bound."""
    n = grid.x_count
    x = d * np.arange(0, n + 1) / n
    Pv = P_poly(d, x)
    w = _w(d)
    pd = 6 * d * d * (d * d + 2 * d - 6)
    q0 = q_alpha(d, 0.0, x)
    q0_bound = -6 * d * d * (d * d + 3 * d - 6)
    return [(float(np.min(Pv)) / (1 + float(np.max(np.abs(Pv)))), dict(w, check=3)),
            (1e-9 - abs(P_poly(d, d) - pd) / pd, dict(w, check=4)),
            (pd, dict(w, check=5)),
            (-float(np.max(q0)) / (1 + float(np.max(np.abs(q0)))), dict(w, check=6)),
            ((q0_bound - float(np.max(q0))) / (1 + abs(q0_bound)), dict(w, check=7))]


def verify_polynomials(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: polynomial_point(*pt, grid), grid.ball_points())
    res += _map(lambda d: polynomial_static(d, grid), grid.dims)
    return _report("polynomials", res, 1e-9, dict(_ball_grid_meta(grid), x_count=grid.x_count),
                   {"checks": ["p_alpha(x)/x > 0", "q_alpha(x) < 0", "expansion residual <= 1e-9",
                               "P > 0 on [0,d]", "P(d) = 6d^2(d^2+2d-6)", "P(d) > 0",
                               "q_0 < 0 on [0,d]", "q_0 <= -6d^2(d^2+3d-6)"]},
                   started=t0)


# --- trial profile and monotonicity ------------------------------------------

def trial_profile_point(d, tau, alpha, grid: GridSpec):
    t = TrialProfile.from_params(BallParams(d, tau, alpha))
    n = grid.r_count
    r = 10.0 * np.arange(0, n + 1) / n
    r = np.union1d(r, np.arange(0, n + 1) / n)
    p0, p1, p2 = t.rho(r, 0), t.rho(r, 1), t.rho(r, 2)
    f = p0 - r * p1
    g = alpha * p0 + tau * p1
    w = _w(d, tau, alpha)
    out = []

    def add(check, vals, grid_r):
        v, extra = _min_at(_normalized(vals), grid_r)
        out.append((v, dict(w, check=check, **extra)))

    add(0, p0, r)
    add(1, p1, r)
    add(2, -p2, r)
    add(3, f, r)
    add(4, np.diff(f) / (1 + np.max(np.abs(f))), r[:-1])
    add(5, -r * p2, r)
    add(6, -np.diff(g) / (1 + np.max(np.abs(g))), r[:-1])
    ins = r <= 1.0
    add(7, g[ins], r[ins])
    R1, dR1 = t.edge
    scale = 1.0 + abs(alpha * R1) + abs(tau * dR1)
    out.append((1e-10 - abs(v_rad_identity_residual(t)) / scale, dict(w, check=8)))
    out.append((min(t.gamma, 1.0 - t.gamma), dict(w, check=9)))
    out.append((1e-11 - abs(t.rho(1.0, 2)) / (1 + np.max(np.abs(p2))), dict(w, check=10)))
    return out


def verify_trial_profile(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: trial_profile_point(*pt, grid), grid.ball_points())
    return _report("trial_profile", res, 1e-12, dict(_ball_grid_meta(grid), r_max=10.0),
                   {"checks": ["rho >= 0", "rho' >= 0", "rho'' <= 0", "rho - r rho' >= 0",
                               "rho - r rho' nondecreasing", "-r rho'' >= 0",
                               "alpha rho + tau rho' nonincreasing",
                               "alpha rho + tau rho' > 0 on [0,1]",
                               "boundary identity residual <= 1e-10", "0 < gamma <= 1",
                               "rho''(1) = 0"]},
                   started=t0)


PM_INNER = np.logspace(-3, 0, 500)
PM_OUTER = np.linspace(1.0, 10.0, 500)


def partial_monotonicity_point(d, tau, alpha, grid: GridSpec):
    t = TrialProfile.from_params(BallParams(d, tau, alpha))
    inner = N_of_rho(t, PM_INNER)
    outer = N_of_rho(t, PM_OUTER)
    scale = max(float(np.max(np.abs(inner))), float(np.max(np.abs(outer))), 1e-300)
    i, o = int(np.argmin(inner)), int(np.argmax(outer))
    return [((inner[i] - outer[o]) / scale,
             _w(d, tau, alpha, r_in=PM_INNER[i], r_out=PM_OUTER[o]))]


def verify_partial_monotonicity(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: partial_monotonicity_point(*pt, grid), grid.ball_points())
    return _report("partial_monotonicity", res, 1e-10,
                   dict(_ball_grid_meta(grid), r_inner=[1e-3, 1.0, 500], r_outer=[1.0, 10.0, 500]),
                   started=t0)


def tail_point(d, tau, alpha, grid: GridSpec):
    t = TrialProfile.from_params(BallParams(d, tau, alpha))
    r = PM_OUTER
    der = outer_tail_derivative(t, r)
    scale = 1.0 + float(np.max(np.abs(der)))
    h = 1e-5
    fd = (outer_tail(t, r + h) - outer_tail(t, r - h)) / (2 * h)
    fd_err = float(np.max(np.abs(fd - der))) / (1.0 + float(np.max(np.abs(outer_tail(t, r)))))
    # the closed form must match the profile-based parts
    _, N2, N3 = N_parts(t, r)
    recompose = float(np.max(np.abs((d - 1) * N2 + N3 - outer_tail(t, r))))
    v, extra = _min_at(-der / scale, r)
    w = _w(d, tau, alpha)
    return [(v, dict(w, check=0, **extra)), (1e-6 - fd_err, dict(w, check=1)),
            (1e-9 - recompose / (1.0 + float(np.max(np.abs(N3)))), dict(w, check=2))]


def verify_tail_monotonicity(grid: GridSpec = GridSpec()) -> VerificationReport:
    t0 = time.perf_counter()
    res = _map(lambda pt: tail_point(*pt, grid), grid.ball_points())
    return _report("tail_monotonicity", res, 1e-12, _ball_grid_meta(grid),
                   {"checks": ["closed-form derivative <= 0 on [1,10]",
                               "closed form vs central differences",
                               "closed form vs profile parts"]},
                   started=t0)


# --- runner ----------------------------------------------------------------------

SUITES = {
    "lorch_szego": verify_lorch_szego,
    "bessel_properties": verify_bessel_properties,
    "membrane_bound": verify_membrane_bound,
    "w1_sign": verify_w1_sign,
    "lambda2_bounds": verify_bounds_lemma,
    "atb_bounds": verify_atb_bounds,
    "large_ta": verify_largeta,
    "small_ta": verify_smallta,
    "polynomials": verify_polynomials,
    "trial_profile": verify_trial_profile,
    "partial_monotonicity": verify_partial_monotonicity,
    "tail_monotonicity": verify_tail_monotonicity,
}

# per-point functions, for re-evaluating a witness on its own
POINT_FUNCTIONS = {
    "lambda2_bounds": bounds_point,
    "atb_bounds": atb_point,
    "large_ta": large_ta_point,
    "small_ta_nice": small_ta_nice_point,
    "small_ta_gamma_lb": small_ta_gamma_lb_point,
    "small_ta_gamma_star": small_ta_gamma_star_point,
    "small_ta_ranges": small_ta_ranges_point,
    "w1_sign": w1_point,
    "trial_profile": trial_profile_point,
    "partial_monotonicity": partial_monotonicity_point,
    "tail_monotonicity": tail_point,
}


def reevaluate(report: VerificationReport, grid: GridSpec = GridSpec()) -> float:
    """Margin at the report's witness, recomputed from that point alone."""
    fn = POINT_FUNCTIONS[report.lemma]
    w = report.witness
    res = fn(w["d"], w["tau"], w["alpha"], grid)
    matches = [m for m, wit in res if wit == w]
    if not matches:
        raise KeyError("witness not reproduced")
    return matches[0]


def suite_names():
    return list(SUITES)


def run_all(config: dict | GridSpec | None = None, suites=None) -> list:
    """Run the selected suites (default: all) in a fixed order."""
    if isinstance(config, GridSpec):
        grid = config
    else:
        config = dict(config or {})
        grid = GridSpec.from_dict(config.get("grid", {}))
        suites = suites or config.get("suites")
    names = suite_names() if suites in (None, "all", ["all"]) else list(suites)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise DomainError(f"unknown lemma id(s): {unknown}; known: {suite_names()}")
    reports = []
    for name in names:
        out = SUITES[name](grid)
        reports.extend(out if isinstance(out, list) else [out])
    return reports


def load_config(path) -> dict:
    path = str(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".json"):
        return json.loads(raw)
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    return tomllib.loads(raw.decode())
