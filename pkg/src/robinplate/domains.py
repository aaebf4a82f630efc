"""Smooth star-shaped planar domains and their quadrature rules.

A domain is the set {c + r (cos t, sin t) : 0 <= r < rb(t)} for a positive,
smooth, 2pi-periodic boundary radius rb about the center c.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

KINDS = ("disk", "ellipse", "perturbed")

# trapezoid size used for area and centroid
_AREA_POINTS = 4096


@dataclass(frozen=True)
class Domain2D:
    """Preset domain, optionally dilated by ``scale`` and translated by ``shift``.

    params:
        disk      (R,)
        ellipse   (p, q)        semi-axes along x and y
        perturbed (R, eps, k)   rb = R (1 + eps cos k t)
    """
    kind: str
    params: tuple
    scale: float = 1.0
    shift: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown domain kind {self.kind!r}; expected one of {KINDS}")
        expected = {"disk": 1, "ellipse": 2, "perturbed": 3}[self.kind]
        params = tuple(float(v) for v in self.params)
        if len(params) != expected:
            raise DomainError(f"{self.kind} takes {expected} parameters, got {len(params)}")
        if self.kind == "perturbed":
            R, eps, k = params
            if k != int(k) or k < 1:
                raise DomainError("perturbation mode k must be a positive integer")
            if not 0 <= abs(eps) < 1:
                raise DomainError("perturbation amplitude must satisfy |eps| < 1")
            if R <= 0:
                raise DomainError("radius must be positive")
        elif any(v <= 0 for v in params):
            raise DomainError(f"{self.kind} parameters must be positive")
        if not self.scale > 0:
            raise DomainError("scale must be positive")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "shift", tuple(float(v) for v in self.shift))

    # --- constructors ------------------------------------------------------
    @classmethod
    def disk(cls, R: float = 1.0) -> "Domain2D":
        return cls("disk", (R,))

    @classmethod
    def ellipse(cls, p: float, q: float) -> "Domain2D":
        return cls("ellipse", (p, q))

    @classmethod
    def ellipse_with_area(cls, aspect: float, area: float = math.pi) -> "Domain2D":
        """Ellipse with semi-axes ratio ``aspect`` (x over y) and the given area."""
        q = math.sqrt(area / (math.pi * aspect))
        return cls("ellipse", (aspect * q, q))

    @classmethod
    def perturbed(cls, eps: float, k: int, R: float = 1.0) -> "Domain2D":
        return cls("perturbed", (R, eps, k))

    @classmethod
    def from_spec(cls, spec: dict) -> "Domain2D":
        """Build from {kind, params..., optional area, scale, shift}."""
        if not isinstance(spec, dict) or "kind" not in spec:
            raise DomainError("domain spec needs a 'kind' entry")
        kind = spec["kind"]
        if isinstance(spec.get("params"), (list, tuple)):
            # the form written by to_spec
            return cls(kind, tuple(spec["params"]), spec.get("scale", 1.0),
                       tuple(spec.get("shift", (0.0, 0.0))))
        params = dict(spec.get("params", {}))
        params.update({k: v for k, v in spec.items()
                       if k not in ("kind", "params", "area", "scale", "shift")})
        try:
            if kind == "disk":
                dom = cls.disk(params.get("radius", 1.0))
            elif kind == "ellipse":
                if "aspect" in params:
                    dom = cls.ellipse_with_area(params["aspect"])
                else:
                    dom = cls.ellipse(*params["semi_axes"])
            elif kind == "perturbed":
                dom = cls.perturbed(params["eps"], params["k"], params.get("radius", 1.0))
            else:
                raise DomainError(f"unknown domain kind {kind!r}; expected one of {KINDS}")
        except (KeyError, TypeError) as exc:
            raise DomainError(f"bad parameters for {kind}: {exc}") from None
        if "scale" in spec:
            dom = dom.scaled(spec["scale"])
        if "area" in spec:
            dom = dom.with_area(spec["area"])
        if "shift" in spec:
            dom = dom.translated(spec["shift"])
        return dom

    @classmethod
    def from_file(cls, path) -> "Domain2D":
        path = str(path)
        with open(path, "rb") as fh:
            raw = fh.read()
        if path.endswith(".json"):
            spec = json.loads(raw)
        else:
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            spec = tomllib.loads(raw.decode())
        if "domain" in spec and isinstance(spec["domain"], dict):
            spec = spec["domain"]
        return cls.from_spec(spec)

    def to_spec(self) -> dict:
        return {"kind": self.kind, "params": list(self.params), "scale": self.scale,
                "shift": list(self.shift)}

    # --- geometry ----------------------------------------------------------
    @property
    def center(self) -> np.ndarray:
        return np.array(self.shift)

    def _base(self, t, order):
        t = np.asarray(t, dtype=float)
        if self.kind == "disk":
            (R,) = self.params
            return np.full_like(t, R) if order == 0 else np.zeros_like(t)
        if self.kind == "ellipse":
            p, q = self.params
            c, s = np.cos(t), np.sin(t)
            den = q * q * c * c + p * p * s * s
            if order == 0:
                return p * q / np.sqrt(den)
            return -p * q * (p * p - q * q) * s * c / den ** 1.5
        R, eps, k = self.params
        if order == 0:
            return R * (1.0 + eps * np.cos(k * t))
        return -R * eps * k * np.sin(k * t)

    def rb(self, t):
        """Boundary radius about the center."""
        return self.scale * self._base(t, 0)

    def rb_prime(self, t):
        return self.scale * self._base(t, 1)

    def scaled(self, t: float) -> "Domain2D":
        """The dilation t * Omega about the origin."""
        return Domain2D(self.kind, self.params, self.scale * t,
                        (t * self.shift[0], t * self.shift[1]))

    def translated(self, v) -> "Domain2D":
        return Domain2D(self.kind, self.params, self.scale,
                        (self.shift[0] + float(v[0]), self.shift[1] + float(v[1])))

    def with_area(self, area: float) -> "Domain2D":
        return self.scaled(math.sqrt(area / self.area))

    @property
    def area(self) -> float:
        t = _uniform_angles(_AREA_POINTS)
        return float(0.5 * np.sum(self.rb(t) ** 2) * (2 * math.pi / _AREA_POINTS))

    def exact_area(self) -> float:
        s2 = self.scale ** 2
        if self.kind == "disk":
            return s2 * math.pi * self.params[0] ** 2
        if self.kind == "ellipse":
            return s2 * math.pi * self.params[0] * self.params[1]
        R, eps, _ = self.params
        return s2 * math.pi * R * R * (1.0 + 0.5 * eps * eps)

    @property
    def centroid(self) -> np.ndarray:
        t = _uniform_angles(_AREA_POINTS)
        r3 = self.rb(t) ** 3 * (2 * math.pi / _AREA_POINTS) / 3.0
        m = np.array([np.sum(r3 * np.cos(t)), np.sum(r3 * np.sin(t))]) / self.area
        return m + self.center

    @property
    def equal_area_radius(self) -> float:
        return math.sqrt(self.area / math.pi)

    def bounding_box(self, samples: int = 2048):
        t = _uniform_angles(samples)
        r = self.rb(t)
        x = self.shift[0] + r * np.cos(t)
        y = self.shift[1] + r * np.sin(t)
        # pad by the sampling error of the extremes
        pad = 1e-9 * float(np.max(r))
        return (x.min() - pad, x.max() + pad), (y.min() - pad, y.max() + pad)

    def radius_about(self, point, t, iterations: int = 80):
        """Boundary distance along rays from ``point`` (must see the whole boundary)."""
        point = np.asarray(point, dtype=float)
        t = np.asarray(t, dtype=float)
        off = point - self.center
        rel = math.hypot(*off)
        if rel >= float(np.min(self.rb(_uniform_angles(512)))):
            raise DomainError("point is too far from the center for polar quadrature")
        ex, ey = np.cos(t), np.sin(t)
        lo = np.zeros_like(t)
        hi = np.full_like(t, rel + self.scale * 2.0 * max(self.params[:2]) + 1.0)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            px, py = off[0] + mid * ex, off[1] + mid * ey
            inside = np.hypot(px, py) < self.rb(np.arctan2(py, px))
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)


def _uniform_angles(n):
    return 2 * math.pi * np.arange(n) / n


@dataclass(frozen=True)
class Quadrature:
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class BoundaryQuadrature:
    x: np.ndarray
    y: np.ndarray
    nx: np.ndarray
    ny: np.ndarray
    w: np.ndarray


def interior_quadrature(dom: Domain2D, n_r: int, n_theta: int, center=None,
                        split=None) -> Quadrature:
    """Polar rule: Gauss-Legendre in the radial fraction, trapezoid in angle.

    With ``split`` the radial segment of every ray is cut at that distance from
    the polar center, so integrands with a kink on that circle stay accurate.
    """
    if n_r < 1 or n_theta < 3:
        raise DomainError("quadrature needs n_r >= 1 and n_theta >= 3")
    t = _uniform_angles(n_theta)
    if center is None:
        c = dom.center
        rb = dom.rb(t)
    else:
        c = np.asarray(center, dtype=float)
        rb = dom.radius_about(c, t)
    s, ws = np.polynomial.legendre.leggauss(n_r)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    dt = 2 * math.pi / n_theta
    if split is None:
        segments = [(np.zeros_like(rb), rb)]
    else:
        cut = np.minimum(rb, split)
        segments = [(np.zeros_like(rb), cut), (cut, rb)]
    xs, ys, ww = [], [], []
    for lo, hi in segments:
        length = hi - lo
        r = lo[:, None] + length[:, None] * s[None, :]
        w = (length[:, None] * ws[None, :]) * r * dt
        xs.append(c[0] + r * np.cos(t)[:, None])
        ys.append(c[1] + r * np.sin(t)[:, None])
        ww.append(w)
    return Quadrature(np.concatenate([a.ravel() for a in xs]),
                      np.concatenate([a.ravel() for a in ys]),
                      np.concatenate([a.ravel() for a in ww]))


def boundary_quadrature(dom: Domain2D, n_theta: int) -> BoundaryQuadrature:
    """Trapezoid rule along the boundary with arclength weights and outward normals."""
    t = _uniform_angles(n_theta)
    r, rp = dom.rb(t), dom.rb_prime(t)
    c, s = np.cos(t), np.sin(t)
    speed = np.sqrt(r * r + rp * rp)
    nx = (r * c + rp * s) / speed
    ny = (r * s - rp * c) / speed
    return BoundaryQuadrature(dom.center[0] + r * c, dom.center[1] + r * s, nx, ny,
                              speed * (2 * math.pi / n_theta))
