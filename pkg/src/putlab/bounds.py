"""The lower/upper pair returned by every privacy-distortion routine."""

from __future__ import annotations

import math
from dataclasses import dataclass

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class BoundPair:
    """Bracket ``lower <= eps*(D) <= upper`` on a privacy-distortion function.

    ``exact`` is set when the two sides coincide analytically.  ``note``
    records caveats such as a lower bound that clamped to zero.
    """

    lower: float
    upper: float
    exact: bool = False
    note: str = ""

    @classmethod
    def point(cls, value: float, note: str = "") -> "BoundPair":
        return cls(value, value, True, note)

    @classmethod
    def zero(cls) -> "BoundPair":
        return cls(0.0, 0.0, True, "zero region")

    @property
    def value(self) -> float:
        """The exact value; only defined when ``exact`` is set."""
        if not self.exact:
            raise ValueError("bounds are not tight; use lower/upper")
        return self.upper

    def scaled(self, factor: float) -> "BoundPair":
        return BoundPair(factor * self.lower, factor * self.upper, self.exact, self.note)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


def clamp_log(arg: float) -> float:
    """``max(0, log(arg))`` with non-positive arguments mapped to 0."""
    if not arg > 0:
        return 0.0
    return max(0.0, math.log(arg))
