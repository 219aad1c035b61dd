"""Arrays stored as ``mant * exp(scale)`` so that far-tail values stay finite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Scaled:
    mant: np.ndarray
    scale: np.ndarray

    @classmethod
    def of(cls, values) -> "Scaled":
        values = np.asarray(values, dtype=float)
        return cls(values, np.zeros_like(values))

    @classmethod
    def from_log(cls, log_abs, sign=1.0) -> "Scaled":
        log_abs = np.asarray(log_abs, dtype=float)
        return cls(np.broadcast_to(np.asarray(sign, dtype=float), log_abs.shape).copy(), log_abs)

    def value(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.mant * np.exp(self.scale)

    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mant)) + self.scale

    def sign(self) -> np.ndarray:
        return np.sign(self.mant)

    def at_scale(self, scale) -> np.ndarray:
        """Mantissa expressed relative to ``exp(scale)``."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.mant * np.exp(self.scale - scale)

    def shift(self, log_factor) -> "Scaled":
        return Scaled(self.mant, self.scale + log_factor)

    def __mul__(self, factor) -> "Scaled":
        if isinstance(factor, Scaled):
            return Scaled(self.mant * factor.mant, self.scale + factor.scale)
        return Scaled(self.mant * factor, self.scale)

    def ratio(self, other: "Scaled") -> np.ndarray:
        """Plain array ``self / other``."""
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return (self.mant / other.mant) * np.exp(self.scale - other.scale)

    __rmul__ = __mul__

    def __neg__(self) -> "Scaled":
        return Scaled(-self.mant, self.scale)

    def __add__(self, other: "Scaled") -> "Scaled":
        s1 = np.where(self.mant != 0, self.scale, -np.inf)
        s2 = np.where(other.mant != 0, other.scale, -np.inf)
        s = np.maximum(s1, s2)
        s = np.where(np.isfinite(s), s, 0.0)
        with np.errstate(invalid="ignore", over="ignore"):
            m = self.mant * np.exp(s1 - s) + other.mant * np.exp(s2 - s)
        return Scaled(m, s)

    def __sub__(self, other: "Scaled") -> "Scaled":
        return self + (-other)

    def normalized(self) -> "Scaled":
        """Move the mantissa magnitude into the scale (mant in {-1, 0, 1} * O(1))."""
        with np.errstate(divide="ignore"):
            la = np.log(np.abs(self.mant))
        la = np.where(np.isfinite(la), la, 0.0)
        return Scaled(self.mant * np.exp(-la), self.scale + la)

    def __getitem__(self, idx) -> "Scaled":
        return Scaled(self.mant[idx], self.scale[idx])


def combine(*terms: Scaled) -> Scaled:
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total
