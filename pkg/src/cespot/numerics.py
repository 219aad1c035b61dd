"""Coordinate maps, truncation windows and quadrature shared by the
construction and the numerical oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .errors import ConvergenceError
from .fields import Domain, DomainKind

# exp(-2 * WKB_ACTION) is the relative weight of the discarded tail
WKB_ACTION = 25.0
HALF_LINE_FLOOR = 1e-5
INTERVAL_Y = 9.0


@dataclass(frozen=True)
class Mapping:
    """Smooth map x = g(y) from a computational coordinate y.

    ``uniform``: x = y.  ``exp``: x = exp(y) (half line).  ``tanh``:
    x = center + half_width * tanh(y) (finite interval).
    """

    kind: str
    center: float = 0.0
    half_width: float = 1.0

    def x(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "uniform":
            return y
        if self.kind == "exp":
            return np.exp(y)
        return self.center + self.half_width * np.tanh(y)

    def y(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            return x
        if self.kind == "exp":
            return np.log(x)
        return np.arctanh((x - self.center) / self.half_width)

    def p(self, y):
        """dx/dy."""
        y = np.asarray(y, dtype=float)
        if self.kind == "uniform":
            return np.ones_like(y)
        if self.kind == "exp":
            return np.exp(y)
        return self.half_width / np.cosh(y) ** 2

    def q_extra(self, y):
        """(3/8)(p'/p)^2 - (1/4) p''/p, the Liouville correction to the potential."""
        y = np.asarray(y, dtype=float)
        if self.kind == "uniform":
            return np.zeros_like(y)
        if self.kind == "exp":
            return np.full_like(y, 0.125)
        return np.full_like(y, 0.5)

    def dlogp(self, y):
        """d log(dx/dy) / dy."""
        y = np.asarray(y, dtype=float)
        if self.kind == "uniform":
            return np.zeros_like(y)
        if self.kind == "exp":
            return np.ones_like(y)
        return -2.0 * np.tanh(y)

    def end_distance(self, x):
        """Distance from x to the nearest finite end of the mapped domain."""
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            return np.full_like(x, np.inf)
        if self.kind == "exp":
            return x
        return np.minimum(x - (self.center - self.half_width), (self.center + self.half_width) - x)

    @property
    def end_rate(self) -> float:
        """|d log(distance to the finite end) / dy| far out along the map."""
        return {"uniform": 0.0, "exp": 1.0, "tanh": 2.0}[self.kind]


def mapping_for(domain: Domain) -> Mapping:
    if domain.kind is DomainKind.FULL_LINE:
        return Mapping("uniform")
    if domain.kind is DomainKind.HALF_LINE:
        return Mapping("exp")
    return Mapping("tanh", 0.5 * (domain.lower + domain.upper), 0.5 * (domain.upper - domain.lower))


def mapped_derivatives(fn: Callable, mapping: Mapping, y, h: float = 1e-3):
    """(f, df/dx, d²f/dx²) at x = g(y) by fourth-order differences in y."""
    y = np.asarray(y, dtype=float)
    x = mapping.x
    f = [np.asarray(fn(x(y + k * h)), dtype=float) for k in (-2, -1, 0, 1, 2)]
    fy = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    fyy = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    p = mapping.p(y)
    return f[2], fy / p, (fyy - mapping.dlogp(y) * fy) / (p * p)


# ---------------------------------------------------------------------------
# truncation


def _finite(v: np.ndarray) -> np.ndarray:
    v = np.where(np.isnan(v), np.inf, v)
    return v


def wkb_extend(v: Callable, x0: float, direction: int, e_max: float, limit: float,
               action: float = WKB_ACTION) -> float:
    """Walk outward from ``x0`` until the WKB decay action above ``e_max``
    reaches ``action``; never beyond ``limit``."""
    dist = np.concatenate([np.linspace(0.0, 50.0, 5001)[1:], np.geomspace(50.0, 1e5, 3000)[1:]])
    xs = x0 + direction * dist
    if direction > 0:
        xs = xs[xs < limit]
    else:
        xs = xs[xs > limit]
    if xs.size == 0:
        return limit
    with np.errstate(all="ignore"):
        vals = _finite(np.asarray(v(xs), dtype=float))
        k = np.sqrt(2.0 * np.maximum(vals - e_max, 0.0))
    steps = np.diff(np.concatenate([[0.0], np.abs(xs - x0)]))
    cum = np.cumsum(k * steps)
    hit = np.nonzero(cum >= action)[0]
    if hit.size == 0:
        return float(xs[-1])
    return float(xs[hit[0]])


def classical_core(v: Callable, lo: float, hi: float, e_max: float, n: int = 20001):
    """Smallest interval containing every point of [lo, hi] with V < e_max."""
    xs = np.linspace(lo, hi, n)
    with np.errstate(all="ignore"):
        vals = np.asarray(v(xs), dtype=float)
    allowed = np.nonzero(np.isfinite(vals) & (vals < e_max))[0]
    if allowed.size == 0:
        i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.nan)))
        return float(xs[i]), float(xs[i])
    return float(xs[allowed[0]]), float(xs[allowed[-1]])


def singular_strength(v: Callable, end: float, inward: int, dist: float = 1e-9) -> float:
    """c = lim d^2 V(end + inward*d) as d -> 0 (coefficient of an inverse-square wall)."""
    with np.errstate(all="ignore"):
        val = float(np.asarray(v(np.array([end + inward * dist])), dtype=float)[0])
    if not math.isfinite(val):
        return 0.0
    return val * dist * dist


def robin_rate(c: float, end_rate: float) -> float:
    """Decay rate in y of the Liouville function towards a finite end with V ~ c/d^2."""
    return end_rate * math.sqrt(max(0.25 + 2.0 * c, 0.0))


@dataclass(frozen=True)
class Window:
    mapping: Mapping
    y_lo: float
    y_hi: float
    robin_lo: float | None = None   # decay rate for a ghost-node Robin condition, None = Dirichlet
    robin_hi: float | None = None

    @property
    def x_range(self) -> tuple[float, float]:
        return float(self.mapping.x(self.y_lo)), float(self.mapping.x(self.y_hi))


def choose_window(v: Callable, domain: Domain, e_max: float, search: tuple[float, float],
                  far: tuple[float, float] | None = None, robin: bool = True) -> Window:
    """Truncation adapted to the potential: classical region for ``e_max`` plus
    WKB tails on infinite ends, and inverse-square boundary exponents on
    finite singular ends.  ``search`` bounds the classical-region search and
    ``far`` bounds the tail extension."""
    mapping = mapping_for(domain)
    if domain.kind is DomainKind.INTERVAL:
        rl = robin_rate(singular_strength(v, domain.lower, +1), 2.0) if robin else None
        rh = robin_rate(singular_strength(v, domain.upper, -1), 2.0) if robin else None
        return Window(mapping, -INTERVAL_Y, INTERVAL_Y, rl, rh)
    if far is None:
        far = (search[0] - 1e3, search[1] + 1e3)
    lo, hi = classical_core(v, search[0], search[1], e_max)
    x_hi = wkb_extend(v, hi, +1, e_max, limit=far[1])
    if domain.kind is DomainKind.FULL_LINE:
        x_lo = wkb_extend(v, lo, -1, e_max, limit=far[0])
        return Window(mapping, x_lo, x_hi)
    rl = robin_rate(singular_strength(v, 0.0, +1), 1.0) if robin else None
    floor = HALF_LINE_FLOOR * min(1.0, max(hi, 1e-3))
    return Window(mapping, math.log(floor), math.log(x_hi), rl, None)


# ---------------------------------------------------------------------------
# quadrature

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _composite(func_y: Callable, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    y = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.sum(w * func_y(y)))


def integrate_y(func_y: Callable, a: float, b: float, rel_tol: float = 1e-12,
                start_panels: int = 16, max_panels: int = 8192, abs_tol: float = 0.0) -> float:
    """Composite 20-point Gauss-Legendre with panel doubling until two
    successive estimates agree to ``rel_tol`` (or ``abs_tol``)."""
    panels = start_panels
    prev = _composite(func_y, a, b, panels)
    while panels < max_panels:
        panels *= 2
        cur = _composite(func_y, a, b, panels)
        if abs(cur - prev) <= max(rel_tol * abs(cur), abs_tol, 1e-300):
            return cur
        prev = cur
    raise ConvergenceError("quadrature did not converge")


def integrate(func_x: Callable, window: Window, rel_tol: float = 1e-12, abs_tol: float = 0.0) -> float:
    """Integral of ``func_x`` over the x-range of ``window`` (using its map)."""
    m = window.mapping

    def g(y):
        with np.errstate(all="ignore"):
            vals = np.asarray(func_x(m.x(y)), dtype=float) * m.p(y)
        return np.where(np.isfinite(vals), vals, 0.0)

    return integrate_y(g, window.y_lo, window.y_hi, rel_tol, abs_tol=abs_tol)


def log_integral(log_func: Callable, a: float, b: float, nodes: int = 64) -> float:
    """log of the integral of exp(log_func) over [a, b] (fixed Gauss-Legendre rule)."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    with np.errstate(all="ignore"):
        lf = np.asarray(log_func(x), dtype=float)
    lf = np.where(np.isnan(lf), np.inf, lf)
    return float(logsumexp(lf + np.log(0.5 * abs(b - a) * w)))
