"""Negotiation domain geometry and the log-utility family.

The domain is the triangle {x1 >= 0, x2 >= 0, x1 + x2 <= k}; utilities are
a1*ln(x1) + a2*ln(x2) + a3*ln(k - x1 - x2) with nonnegative coefficients.
Everything here is an immutable value object, safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EvaluationError, ShapeError

#: default strict-interior offset as a fraction of k; log utilities diverge
#: at the boundary, so every line search backs off by this much.
DEFAULT_MARGIN_RATIO = 1e-9


@dataclass(frozen=True)
class Point:
    """A settlement candidate (issue-1 quantity, issue-2 quantity)."""

    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError(f"point coordinates must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2])

    @staticmethod
    def from_array(a) -> "Point":
        return Point(float(a[0]), float(a[1]))

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x1 - other.x1, self.x2 - other.x2)


@dataclass(frozen=True)
class TriangularDomain:
    """Feasible set {x1 >= 0, x2 >= 0, x1 + x2 <= k} with a strict-interior margin."""

    k: float
    interior_margin: float = None  # defaults to DEFAULT_MARGIN_RATIO * k

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError(f"resource cap must be positive, got k={self.k}")
        if self.interior_margin is None:
            object.__setattr__(self, "interior_margin", DEFAULT_MARGIN_RATIO * self.k)
        if not 0 < self.interior_margin < self.k / 100:
            raise ValueError(
                f"interior_margin must lie in (0, k/100), got {self.interior_margin}")

    def contains(self, x: Point, strict: bool = False) -> bool:
        """Membership test; strict requires slack >= interior_margin everywhere."""
        m = self.interior_margin if strict else 0.0
        return x.x1 >= m and x.x2 >= m and self.k - x.x1 - x.x2 >= m


@dataclass(frozen=True)
class UtilitySpec:
    """Coefficients of one party's log utility.

    Kept as an explicit record (not a callable) so the manipulation attacks
    can solve for coefficients in closed form.
    """

    a1: float
    a2: float
    a3: float
    k: float

    def __post_init__(self):
        if self.a1 < 0 or self.a2 < 0 or self.a3 < 0:
            raise ValueError(f"coefficients must be nonnegative, got {self}")
        if self.a1 == self.a2 == self.a3 == 0:
            raise ValueError("at least one coefficient must be positive")
        if self.k <= 0:
            raise ValueError(f"resource cap must be positive, got k={self.k}")

    def coeffs(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    def _check_domain(self, x: Point) -> None:
        if self.a1 > 0 and x.x1 <= 0:
            raise EvaluationError(f"constraint x1 > 0 violated at {x}")
        if self.a2 > 0 and x.x2 <= 0:
            raise EvaluationError(f"constraint x2 > 0 violated at {x}")
        if self.a3 > 0 and self.k - x.x1 - x.x2 <= 0:
            raise EvaluationError(f"constraint x1 + x2 < k violated at {x}")

    def value(self, x: Point) -> float:
        self._check_domain(x)
        return _kernels.util_value(self.coeffs(), self.k, x.x1, x.x2)

    def gradient(self, x: Point) -> np.ndarray:
        self._check_domain(x)
        gx, gy = _kernels.util_grad(self.coeffs(), self.k, x.x1, x.x2)
        return np.array([gx, gy])

    def is_perfect_competition(self) -> bool:
        """Exactly one of the own-quantity coefficients is zero."""
        return (self.a1 > 0) != (self.a2 > 0)

    def bliss_point(self) -> Point:
        """Feasible maximizer, defined for perfect-competition shapes."""
        if not self.is_perfect_competition():
            raise ShapeError(
                f"bliss point needs a perfect-competition shape, got {self}")
        if self.a1 > 0:
            return Point(self.k * self.a1 / (self.a1 + self.a3), 0.0)
        return Point(0.0, self.k * self.a2 / (self.a2 + self.a3))


@dataclass(frozen=True)
class ParetoSegment:
    """The efficient frontier: the segment between the two bliss points."""

    b1: Point
    b2: Point

    def distance_to(self, x: Point) -> float:
        return _kernels.seg_distance(self.b1.x1, self.b1.x2,
                                     self.b2.x1, self.b2.x2, x.x1, x.x2)

    def point_at(self, t: float) -> Point:
        """Convex combination b1 + t*(b2 - b1), t in [0, 1]."""
        return Point(self.b1.x1 + t * (self.b2.x1 - self.b1.x1),
                     self.b1.x2 + t * (self.b2.x2 - self.b1.x2))


def pareto_frontier(u1: UtilitySpec, u2: UtilitySpec) -> ParetoSegment:
    """Frontier of a perfect-competition pair (party 1 on x1, party 2 on x2)."""
    if not (u1.a1 > 0 and u1.a2 == 0):
        raise ShapeError(f"party 1 must have shape (a1, 0, a3), got {u1}")
    if not (u2.a1 == 0 and u2.a2 > 0):
        raise ShapeError(f"party 2 must have shape (0, a2, a3), got {u2}")
    return ParetoSegment(u1.bliss_point(), u2.bliss_point())
