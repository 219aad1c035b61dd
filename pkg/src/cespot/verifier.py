"""Independent numerical oracle: a three-point discretization of
-1/2 d²/dx² + V, its lowest eigenvalues, and comparisons with the analytic
spectra.

Infinite and singular domains are handled with a smooth coordinate map
x = g(y) and the Liouville substitution ψ = sqrt(g') φ, so the matrix is
still a symmetric tridiagonal built on a uniform grid in y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, SingularityError
from .fields import Domain
from .numerics import Mapping, Window, choose_window, integrate, mapped_derivatives

EIG_TOL = 1e-13
RESIDUAL_STEP = 1e-3


@dataclass(frozen=True)
class Discretization:
    """n interior nodes on a uniform grid in the computational coordinate.

    For the plain ``uniform`` map the computational coordinate is x itself,
    so ``spacing = (x_max - x_min)/(n_points + 1)``; for mapped grids the
    same relation holds in y.  ``robin`` holds optional decay rates for a
    ghost-node condition at either end (None means Dirichlet).
    """

    n_points: int
    truncation: tuple[float, float]
    mapping: Mapping = field(default_factory=lambda: Mapping("uniform"))
    y_range: tuple[float, float] | None = None
    robin: tuple[float | None, float | None] = (None, None)
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.n_points < 64:
            raise ValueError("n_points must be at least 64")
        lo, hi = self.truncation
        if not hi > lo:
            raise ValueError("truncation must be an increasing pair")
        if self.y_range is None:
            object.__setattr__(self, "y_range", tuple(float(v) for v in self.mapping.y(np.array([lo, hi]))))

    @classmethod
    def uniform(cls, x_min: float, x_max: float, n_points: int) -> "Discretization":
        return cls(n_points, (float(x_min), float(x_max)))

    @classmethod
    def from_window(cls, window: Window, n_points: int) -> "Discretization":
        return cls(n_points, window.x_range, window.mapping, (window.y_lo, window.y_hi),
                   (window.robin_lo, window.robin_hi))

    @classmethod
    def adapted(cls, v: Callable, domain: Domain, n_points: int, e_max: float,
                search: tuple[float, float], far: tuple[float, float] | None = None) -> "Discretization":
        """Truncation chosen from the classical region of ``e_max`` plus WKB tails."""
        return cls.from_window(choose_window(v, domain, e_max, search, far), n_points)

    @property
    def spacing(self) -> float:
        lo, hi = self.y_range
        return (hi - lo) / (self.n_points + 1)

    @property
    def window(self) -> Window:
        return Window(self.mapping, self.y_range[0], self.y_range[1], *self.robin)

    def nodes_y(self) -> np.ndarray:
        return self.y_range[0] + self.spacing * np.arange(1, self.n_points + 1)

    def nodes(self) -> np.ndarray:
        return self.mapping.x(self.nodes_y())

    def with_points(self, n_points: int) -> "Discretization":
        return Discretization(n_points, self.truncation, self.mapping, self.y_range, self.robin, self.boundary)


def _matrix(v: Callable, disc: Discretization) -> tuple[np.ndarray, np.ndarray]:
    y = disc.nodes_y()
    m = disc.mapping
    x = m.x(y)
    with np.errstate(all="ignore"):
        vals = np.asarray(v(x), dtype=float)
    bad = np.nonzero(~np.isfinite(vals))[0]
    if bad.size:
        raise SingularityError(f"potential is not finite at x={x[bad[0]]}", float(x[bad[0]]))
    h = disc.spacing
    p = m.p(y)
    mass = p * p
    q = mass * vals + m.q_extra(y)
    diag = 1.0 / h**2 + q
    lo, hi = disc.robin
    if lo is not None:
        diag[0] -= 0.5 * math.exp(-lo * h) / h**2
    if hi is not None:
        diag[-1] -= 0.5 * math.exp(-hi * h) / h**2
    d = diag / mass
    e = (-0.5 / h**2) / np.sqrt(mass[:-1] * mass[1:])
    return d, e


def numeric_spectrum(v: Callable, disc: Discretization, k: int) -> list[float]:
    """Lowest ``k`` eigenvalues (ascending) of the discretized Hamiltonian."""
    if k < 1 or k > disc.n_points // 4:
        raise ValueError("k must lie between 1 and n_points/4")
    d, e = _matrix(v, disc)
    try:
        w = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k - 1),
                             lapack_driver="stebz", tol=EIG_TOL)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    return [float(x) for x in np.sort(w)]


def numeric_eigenpairs(v: Callable, disc: Discretization, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and ψ on the x nodes (unit norm in x, sign fixed by the first lobe)."""
    d, e = _matrix(v, disc)
    w, vec = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1), lapack_driver="stebz", tol=EIG_TOL)
    y = disc.nodes_y()
    p = disc.mapping.p(y)
    # symmetrized vector -> φ -> ψ = φ / sqrt(p), normalized with weight p dy
    psi = vec / np.sqrt(p)[:, None] / math.sqrt(disc.spacing)
    for j in range(psi.shape[1]):
        i = int(np.argmax(np.abs(psi[:, j]) > 1e-3 * np.max(np.abs(psi[:, j]))))
        if psi[i, j] < 0:
            psi[:, j] = -psi[:, j]
    return w, psi


def richardson(coarse: Sequence[float], fine: Sequence[float], ratio: float) -> list[float]:
    """One Richardson step for an O(h²) scheme; ``ratio`` = h_coarse / h_fine."""
    r2 = ratio * ratio
    return [(r2 * f - c) / (r2 - 1.0) for c, f in zip(coarse, fine)]


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class LevelComparison:
    n: int
    e_analytic: float
    e_numeric: float
    abs_err: float
    rel_err: float


@dataclass(frozen=True)
class ComparisonReport:
    levels: tuple[LevelComparison, ...]
    max_rel_err: float
    passed: bool
    grid_refinement_slope: float | None
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "max_rel_err": self.max_rel_err,
            "grid_refinement_slope": self.grid_refinement_slope,
            "levels": [
                {"n": lv.n, "e_analytic": lv.e_analytic, "e_numeric": lv.e_numeric,
                 "abs_err": lv.abs_err, "rel_err": lv.rel_err}
                for lv in self.levels
            ],
        }


def _energies(analytic) -> list[tuple[int, float]]:
    out = []
    for i, a in enumerate(analytic):
        if hasattr(a, "energy"):
            out.append((int(a.n), float(a.energy)))
        else:
            out.append((i, float(a)))
    return out


def _rel(err: float, e: float) -> float:
    # levels at or near zero are measured on an absolute scale of one
    return err / max(abs(e), 1.0)


def compare_spectra(analytic, numeric: Sequence[float], tol: float,
                    coarse: Sequence[float] | None = None, spacing_ratio: float = 2.0) -> ComparisonReport:
    """Pair levels in order.  With ``coarse`` (the same levels on a grid whose
    spacing is ``spacing_ratio`` times larger) the compared values are the
    Richardson extrapolants and the observed order of convergence is
    reported as ``grid_refinement_slope``."""
    ana = _energies(analytic)
    if not ana or len(numeric) == 0:
        raise ValueError("spectra must be non-empty")
    if len(numeric) < len(ana):
        raise ValueError(f"{len(ana)} analytic levels but only {len(numeric)} numeric ones")
    fine = list(numeric[: len(ana)])
    slope = None
    values = fine
    if coarse is not None:
        if len(coarse) < len(ana):
            raise ValueError("coarse spectrum is shorter than the analytic one")
        crs = list(coarse[: len(ana)])
        values = richardson(crs, fine, spacing_ratio)
        orders = []
        for (_, e), c, f in zip(ana, crs, fine):
            ec, ef = abs(c - e), abs(f - e)
            if ef > 1e-11 * max(1.0, abs(e)) and ec > ef:
                orders.append(math.log(ec / ef) / math.log(spacing_ratio))
        slope = float(np.median(orders)) if orders else None
    levels = []
    for (n, e), val in zip(ana, values):
        err = abs(val - e)
        levels.append(LevelComparison(n, e, float(val), float(err), float(_rel(err, e))))
    mx = max(lv.rel_err for lv in levels)
    return ComparisonReport(tuple(levels), float(mx), bool(mx <= tol), slope, float(tol))


# ---------------------------------------------------------------------------
# wavefunction checks


@dataclass(frozen=True)
class LineCheck:
    n: int
    residual: float
    nodes: int


@dataclass(frozen=True)
class WavefunctionReport:
    lines: tuple[LineCheck, ...]
    gram_deviation: float

    @property
    def nodes_ok(self) -> bool:
        return all(c.nodes == c.n for c in self.lines)


def count_nodes(values: np.ndarray, rel_floor: float = 1e-7) -> int:
    """Sign changes of a sampled function, ignoring samples below the floor."""
    v = np.asarray(values, dtype=float)
    keep = np.abs(v) > rel_floor * np.max(np.abs(v))
    s = np.sign(v[keep])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def wavefunction_checks(lines, v: Callable, disc: Discretization, h: float = RESIDUAL_STEP,
                        samples: int = 4000) -> WavefunctionReport:
    """Per line: sup-norm Schrödinger residual with a finite-difference ψ''
    (relative to sup|ψ|), interior node count; plus the largest deviation of
    the Gram matrix from the identity.

    On mapped grids the residual is multiplied by (dx/dy)², the weight it
    carries in the computational coordinate, so inverse-square walls at
    finite ends do not swamp it.
    """
    # differences are taken in the computational coordinate, where power-law
    # behaviour at singular ends is smooth
    ys = np.linspace(disc.y_range[0], disc.y_range[1], samples + 2)[1:-1]
    m = disc.mapping
    hy = h
    ys = ys[(ys - 2 * hy > disc.y_range[0]) & (ys + 2 * hy < disc.y_range[1])]
    x = m.x(ys)
    checks = []
    for line in lines:
        with np.errstate(all="ignore"):
            psi, _, d2 = mapped_derivatives(line.psi, m, ys, hy)
            res = -0.5 * d2 + (np.asarray(v(x), dtype=float) - line.energy) * psi
            # measured in the computational frame (unchanged on uniform grids)
            res = res * m.p(ys) ** 2
        scale = float(np.max(np.abs(psi)))
        checks.append(LineCheck(int(line.n), float(np.nanmax(np.abs(res)) / scale), count_nodes(psi)))
    win = disc.window
    dev = 0.0
    for i, a in enumerate(lines):
        for j, b in enumerate(lines[: i + 1]):
            g = integrate(lambda t, a=a, b=b: a.psi(t) * b.psi(t), win, rel_tol=1e-10, abs_tol=1e-12)
            dev = max(dev, abs(g - (1.0 if i == j else 0.0)))
    return WavefunctionReport(tuple(checks), float(dev))


# ---------------------------------------------------------------------------
# end-to-end check of one configuration


@dataclass(frozen=True)
class Verification:
    report: ComparisonReport
    lines: tuple
    discretization: Discretization
    coarse: tuple[float, ...]
    fine: tuple[float, ...]


def oracle_window(v: Callable, family, params, e_max: float) -> Window:
    from .families import get_family

    fam = get_family(family)
    return choose_window(v, fam.domain, e_max, fam.search, fam.far(params))


def verify(family, params, levels: int, tol: float, n_points: tuple[int, int] = (4000, 8000)) -> Verification:
    """spectrum_minus against the oracle on two grids with one Richardson step."""
    from .construction import Deformation, spectrum_minus

    lines = spectrum_minus(family, params, levels)
    d = Deformation(family, params)
    e_top = max(line.energy for line in lines)
    win = oracle_window(d.v_minus, d.family, d.params, e_top)
    coarse_disc = Discretization.from_window(win, n_points[0])
    fine_disc = coarse_disc.with_points(n_points[1])
    coarse = numeric_spectrum(d.v_minus, coarse_disc, levels)
    fine = numeric_spectrum(d.v_minus, fine_disc, levels)
    ratio = coarse_disc.spacing / fine_disc.spacing
    report = compare_spectra(lines, fine, tol, coarse=coarse, spacing_ratio=ratio)
    return Verification(report, tuple(lines), fine_disc, tuple(coarse), tuple(fine))
