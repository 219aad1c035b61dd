"""Domains and sampled scalar fields."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatchError


class DomainKind(str, enum.Enum):
    FULL_LINE = "full_line"
    HALF_LINE = "half_line"
    INTERVAL = "interval"


@dataclass(frozen=True)
class Domain:
    kind: DomainKind
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("domain needs lower < upper")
        if self.kind is DomainKind.HALF_LINE and self.lower != 0.0:
            raise ValueError("half-line domains start at 0")

    @classmethod
    def full_line(cls) -> "Domain":
        return cls(DomainKind.FULL_LINE, -math.inf, math.inf)

    @classmethod
    def half_line(cls) -> "Domain":
        return cls(DomainKind.HALF_LINE, 0.0, math.inf)

    @classmethod
    def interval(cls, lower: float = -math.pi / 2, upper: float = math.pi / 2) -> "Domain":
        return cls(DomainKind.INTERVAL, lower, upper)

    @property
    def finite_ends(self) -> tuple[bool, bool]:
        return math.isfinite(self.lower), math.isfinite(self.upper)

    def interior(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lower) & (x < self.upper)


Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarField:
    """A real function of position together with its samples on a grid."""

    evaluator: Evaluator
    grid: np.ndarray
    _samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1:
            raise ValueError("grid must be one-dimensional")
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        if self._samples is not None:
            s = np.asarray(self._samples, dtype=float)
            if s.shape != grid.shape:
                raise GridMismatchError("samples and grid differ in length")
            object.__setattr__(self, "_samples", s)

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            object.__setattr__(self, "_samples", np.asarray(self.evaluator(self.grid), dtype=float))
        return self._samples

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def on(self, grid) -> "ScalarField":
        return ScalarField(self.evaluator, grid)

    @classmethod
    def constant(cls, value: float, grid) -> "ScalarField":
        return cls(lambda x: np.full(np.shape(x), float(value)), grid)


def same_grid(*fields: ScalarField) -> np.ndarray:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid.shape != grid.shape or not np.array_equal(f.grid, grid):
            raise GridMismatchError("fields live on different grids")
    return grid
