"""Supersymmetric quantum mechanics on a superpotential W: partner potentials,
supercharges, zero modes, SUSY classification and the intertwining relation.

Units are hbar = m = 1, so H = -1/2 d^2/dx^2 + V.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import BrokenSusyError, ClassificationError, SingularityError, GridMismatchError
from .fields import Domain, DomainKind, ScalarField, same_grid
from scipy.special import logsumexp

from .numerics import Window, integrate, mapping_for

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
# a dyadic tail ratio below this counts as geometric decay
DECAY_RATIO = 1.0 - 1e-6


class SusyType(str, enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"


class Charge(str, enum.Enum):
    A = "A"
    A_DAGGER = "A_dagger"


@dataclass(frozen=True)
class Superpotential:
    """W = Φ + f on a domain.

    ``w_prime`` is the closed-form derivative of W.  ``antiderivative`` returns
    some fixed primitive of W; it must be stable far out (it is used in log
    form for zero modes and normalizability tests).  ``far`` bounds the tail
    tests on infinite ends.
    """

    w: ScalarField
    phi: ScalarField
    f: ScalarField
    domain: Domain
    w_prime: ScalarField | None = None
    antiderivative: Callable | None = None
    far: tuple[float, float] = (-1e4, 1e4)
    sign: float = 1.0

    def __post_init__(self):
        same_grid(self.w, self.phi, self.f)
        grid = self.w.grid
        if np.any(~self.domain.interior(grid)):
            raise ValueError("superpotential grid must lie inside the open domain")
        for name, fld in (("W", self.w), ("Phi", self.phi), ("f", self.f)):
            bad = np.nonzero(~np.isfinite(fld.samples))[0]
            if bad.size:
                x0 = float(grid[bad[0]])
                raise SingularityError(f"{name} is not finite at x={x0}", x0)
        scale = np.maximum(1.0, np.abs(self.w.samples))
        if np.any(np.abs(self.w.samples - self.phi.samples - self.f.samples) > 1e-10 * scale):
            raise ValueError("W must equal Phi + f on the grid")

    @classmethod
    def from_functions(cls, phi: Callable, f: Callable, domain: Domain, grid,
                       w_prime: Callable | None = None, antiderivative: Callable | None = None,
                       far: tuple[float, float] = (-1e4, 1e4)) -> "Superpotential":
        def w(x):
            return phi(x) + f(x)

        wp = ScalarField(w_prime, grid) if w_prime is not None else None
        return cls(ScalarField(w, grid), ScalarField(phi, grid), ScalarField(f, grid), domain,
                   wp, antiderivative, far)

    def flipped(self) -> "Superpotential":
        """W -> -W (swaps the roles of H+ and H-)."""
        def neg(fn):
            return None if fn is None else (lambda x: -fn(x))

        wp = None if self.w_prime is None else ScalarField(neg(self.w_prime.evaluator), self.w.grid)
        return replace(
            self,
            w=ScalarField(neg(self.w.evaluator), self.w.grid),
            phi=ScalarField(neg(self.phi.evaluator), self.w.grid),
            f=ScalarField(neg(self.f.evaluator), self.w.grid),
            w_prime=wp,
            antiderivative=neg(self.antiderivative),
            sign=-self.sign,
        )


def _check_finite(values: np.ndarray, grid: np.ndarray, what: str) -> None:
    bad = np.nonzero(~np.isfinite(values))[0]
    if bad.size:
        x0 = float(grid[bad[0]])
        raise SingularityError(f"{what} is not finite at x={x0}", x0)


def partner_potentials(w: Superpotential) -> tuple[ScalarField, ScalarField]:
    """V± = (W² ± W')/2 on the superpotential grid."""
    if w.w_prime is None:
        raise ValueError("partner potentials need the closed-form derivative W'")
    wf, wpf = w.w.evaluator, w.w_prime.evaluator

    def v_plus(x):
        return 0.5 * (wf(x) ** 2 + wpf(x))

    def v_minus(x):
        return 0.5 * (wf(x) ** 2 - wpf(x))

    vp = ScalarField(v_plus, w.w.grid)
    vm = ScalarField(v_minus, w.w.grid)
    _check_finite(vp.samples, vp.grid, "V+")
    _check_finite(vm.samples, vm.grid, "V-")
    return vp, vm


def apply_supercharge(direction: Charge | str, w: Superpotential, psi: ScalarField,
                      psi_prime: ScalarField) -> ScalarField:
    """A ψ = (ψ' + Wψ)/√2 or A†ψ = (-ψ' + Wψ)/√2, with ψ' supplied in closed form."""
    direction = Charge(direction)
    grid = same_grid(psi, psi_prime)
    s = 1.0 if direction is Charge.A else -1.0
    wf, pf, dpf = w.w.evaluator, psi.evaluator, psi_prime.evaluator

    def out(x):
        return (s * dpf(x) + wf(x) * pf(x)) / SQRT2

    return ScalarField(out, grid)


# ---------------------------------------------------------------------------
# normalizability of exp(∓∫W)


@dataclass(frozen=True)
class TailVerdict:
    end: str
    normalizable: bool
    vanishes: bool
    ratios: tuple[float, ...]


def _end_intervals(domain: Domain, far: tuple[float, float]):
    """Dyadic intervals approaching each end of the domain, outermost last."""
    ends = []
    lo, hi = domain.lower, domain.upper
    if math.isfinite(lo):
        ends.append(("lower", [(lo + 2.0 ** -(k + 1), lo + 2.0 ** -k) for k in range(0, 40)], lo))
    else:
        n = int(math.floor(math.log2(abs(far[0])))) - 1
        ends.append(("lower", [(-(2.0 ** (k + 1)), -(2.0 ** k)) for k in range(0, n)], None))
    if math.isfinite(hi):
        ends.append(("upper", [(hi - 2.0 ** -k, hi - 2.0 ** -(k + 1)) for k in range(0, 40)], hi))
    else:
        n = int(math.floor(math.log2(abs(far[1])))) - 1
        ends.append(("upper", [(2.0 ** k, 2.0 ** (k + 1)) for k in range(0, n)], None))
    return ends


_TAIL_NODES = 64
_GL_T, _GL_W = np.polynomial.legendre.leggauss(_TAIL_NODES)


def _tail_samples(domain: Domain, far):
    """Quadrature nodes for every dyadic interval, grouped per end."""
    groups = []
    for end, intervals, finite_end in _end_intervals(domain, far):
        iv = np.array(intervals)
        a, b = iv[:, :1], iv[:, 1:]
        x = 0.5 * (a + b) + 0.5 * (b - a) * _GL_T[None, :]
        logw = np.log(0.5 * np.abs(b - a) * _GL_W[None, :])
        if finite_end is not None:
            tip = iv[-4:, 0] if end == "lower" else iv[-4:, 1]
        else:
            tip = None
        groups.append((end, x, logw, tip))
    return groups


def _verdict(end: str, log_g: np.ndarray, logw: np.ndarray, tip_log_g) -> TailVerdict:
    lf = np.where(np.isnan(log_g), np.inf, 2.0 * log_g)
    logs = logsumexp(lf + logw, axis=1)
    with np.errstate(invalid="ignore"):
        diffs = np.diff(logs)
    last = diffs[-3:]
    if np.all(logs[-4:] == -np.inf):
        normalizable = True
    elif np.any(np.isnan(last)):
        raise ClassificationError(f"undecidable tail at the {end} end")
    elif np.all(last < math.log(DECAY_RATIO)):
        normalizable = True
    elif np.all(last >= math.log(DECAY_RATIO)):
        normalizable = False
    else:
        raise ClassificationError(f"tail integrals at the {end} end neither decay nor grow")
    vanishes = True
    if tip_log_g is not None:
        # membership in the Hilbert space also needs ψ -> 0 at a finite end
        lg = tip_log_g
        vanishes = bool(np.all(np.diff(lg) < -1e-9) or np.all(lg == -np.inf))
    with np.errstate(over="ignore"):
        ratios = tuple(float(np.exp(d)) if np.isfinite(d) else float(d) for d in last)
    return TailVerdict(end, bool(normalizable), vanishes, ratios)


def _tail_verdicts(log_g: Callable, domain: Domain, far) -> list[TailVerdict]:
    out = []
    for end, x, logw, tip in _tail_samples(domain, far):
        with np.errstate(all="ignore"):
            lg = np.asarray(log_g(x.ravel()), dtype=float).reshape(x.shape)
            tl = None if tip is None else np.asarray(log_g(tip), dtype=float)
        out.append(_verdict(end, lg, logw, tl))
    return out


def _tail_verdict_pair(anti: Callable, domain: Domain, far):
    """Verdicts for exp(-∫W) and exp(+∫W) from one evaluation of ∫W."""
    minus, plus = [], []
    for end, x, logw, tip in _tail_samples(domain, far):
        pts = x.ravel() if tip is None else np.concatenate([x.ravel(), tip])
        with np.errstate(all="ignore"):
            a = np.asarray(anti(pts), dtype=float)
        body = a[: x.size].reshape(x.shape)
        tl = None if tip is None else a[x.size:]
        minus.append(_verdict(end, -body, logw, None if tl is None else -tl))
        plus.append(_verdict(end, body, logw, tl))
    return minus, plus


@dataclass(frozen=True)
class SusyAnalysis:
    susy_type: SusyType
    flipped: bool
    minus: list[TailVerdict] = field(default_factory=list)
    plus: list[TailVerdict] = field(default_factory=list)


def _in_hilbert(verdicts: list[TailVerdict]) -> bool:
    return all(v.normalizable and v.vanishes for v in verdicts)


def analyse_susy(w: Superpotential) -> SusyAnalysis:
    if w.antiderivative is None:
        raise ValueError("SUSY classification needs an antiderivative of W")
    anti = w.antiderivative

    minus, plus = _tail_verdict_pair(anti, w.domain, w.far)
    m_ok, p_ok = _in_hilbert(minus), _in_hilbert(plus)
    if m_ok and p_ok:
        raise ClassificationError("both exp(-∫W) and exp(+∫W) appear normalizable")
    if m_ok:
        return SusyAnalysis(SusyType.UNBROKEN, False, minus, plus)
    if p_ok:
        # the zero mode sits in H+; the convention puts it in H- by flipping W
        log.info("exp(+∫W) is normalizable: orienting W -> -W")
        return SusyAnalysis(SusyType.UNBROKEN, True, minus, plus)
    return SusyAnalysis(SusyType.BROKEN, False, minus, plus)


def classify_susy(w: Superpotential) -> SusyType:
    """Unbroken iff exp(-∫W) (or, after the automatic sign flip, exp(+∫W)) lies in H."""
    return analyse_susy(w).susy_type


def orient(w: Superpotential) -> tuple[Superpotential, bool]:
    """Return W with the sign that puts a possible zero mode into H-."""
    a = analyse_susy(w)
    return (w.flipped(), True) if a.flipped else (w, False)


def support_window(log_density: Callable, domain: Domain, far: tuple[float, float],
                   drop: float = 80.0) -> Window:
    """Region where log_density lies within ``drop`` of its maximum."""
    mapping = mapping_for(domain)
    if domain.kind is DomainKind.INTERVAL:
        return Window(mapping, -9.0, 9.0)
    if domain.kind is DomainKind.HALF_LINE:
        xs = np.geomspace(1e-12, far[1], 20001)
    else:
        xs = np.concatenate([-np.geomspace(-far[0], 1e-6, 10000), [0.0], np.geomspace(1e-6, far[1], 10000)])
    with np.errstate(all="ignore"):
        ld = np.asarray(log_density(xs), dtype=float)
    ld = np.where(np.isnan(ld), -np.inf, ld)
    top = np.max(ld)
    keep = np.nonzero(ld >= top - drop)[0]
    i0, i1 = max(keep[0] - 1, 0), min(keep[-1] + 1, xs.size - 1)
    if domain.kind is DomainKind.HALF_LINE:
        return Window(mapping, math.log(xs[i0]), math.log(xs[i1]))
    return Window(mapping, float(xs[i0]), float(xs[i1]))


def zero_mode(w: Superpotential) -> ScalarField:
    """Unit-norm ψ₀⁻ = C exp(-∫W) on the superpotential grid."""
    analysis = analyse_susy(w)
    if analysis.susy_type is SusyType.BROKEN:
        raise BrokenSusyError("exp(-∫W) is not normalizable: SUSY is broken")
    if analysis.flipped:
        raise BrokenSusyError("exp(-∫W) is not normalizable; use orient() to flip W first")
    anti = w.antiderivative
    win = support_window(lambda x: -2.0 * anti(x), w.domain, w.far)
    ref = _reference_level(lambda x: -anti(x), win)

    def shape(x):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(-anti(x) - ref)

    norm2 = integrate(lambda x: shape(x) ** 2, win)
    c = 1.0 / math.sqrt(norm2)

    def psi(x):
        return c * shape(np.asarray(x, dtype=float))

    return ScalarField(psi, w.w.grid)


def _reference_level(log_fn: Callable, win: Window) -> float:
    ys = np.linspace(win.y_lo, win.y_hi, 4001)
    with np.errstate(all="ignore"):
        vals = np.asarray(log_fn(win.mapping.x(ys)), dtype=float)
    vals = vals[np.isfinite(vals)]
    return float(np.max(vals)) if vals.size else 0.0


# ---------------------------------------------------------------------------
# intertwining


_D1 = {2: (np.array([-0.5, 0.0, 0.5]), 1), 4: (np.array([1, -8, 0, 8, -1]) / 12.0, 2)}
_D2 = {2: (np.array([1.0, -2.0, 1.0]), 1), 4: (np.array([-1, 16, -30, 16, -1]) / 12.0, 2)}


def _fd(values: np.ndarray, h: float, order: int, deriv: int) -> np.ndarray:
    stencil, half = (_D1 if deriv == 1 else _D2)[order]
    out = np.full_like(values, np.nan)
    n = values.size
    acc = np.zeros(n - 2 * half)
    for k, c in enumerate(stencil):
        acc += c * values[k:n - 2 * half + k]
    out[half:n - half] = acc / h**deriv
    return out


def intertwining_residual(w: Superpotential, v_plus: ScalarField, v_minus: ScalarField,
                          test_fn: ScalarField, h: float = 1e-3, order: int = 4) -> float:
    """max |(A H₋ - H₊ A) φ| by finite differences with spacing h over the
    test function's grid range."""
    grid = test_fn.grid
    x = np.arange(grid[0], grid[-1] + 0.5 * h, h)
    phi = test_fn(x)
    scale = max(float(np.max(np.abs(phi))), 1e-300)
    if scale == 1e-300 or np.all(phi == 0):
        return 0.0
    edge = max(abs(phi[0]), abs(phi[-1]))
    if edge > 1e-10 * scale:
        raise ValueError("test function support touches the end of its grid")
    if np.any(~w.domain.interior(x)):
        raise ValueError("test function support leaves the domain")
    wv, vp, vm = w.w(x), v_plus(x), v_minus(x)
    h_minus = -0.5 * _fd(phi, h, order, 2) + vm * phi
    a_hm = (_fd(h_minus, h, order, 1) + wv * h_minus) / SQRT2
    a_phi = (_fd(phi, h, order, 1) + wv * phi) / SQRT2
    hp_a = -0.5 * _fd(a_phi, h, order, 2) + vp * a_phi
    res = a_hm - hp_a
    return float(np.nanmax(np.abs(res)))
