"""The deterministic improving-direction mediation loop.

Each round the mediator announces the bisector of the two normalized
gradients; each party answers with its preferred step along that ray,
bounded by the mediator's per-round cap; the joint step is the minimum.
The iteration stops once the displacement falls below the convergence
tolerance, which on this domain happens only at the efficient frontier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .domain import Point, TriangularDomain, UtilitySpec
from .errors import DegenerateGradientError, EvaluationError


@dataclass(frozen=True)
class IdmConfig:
    convergence_tol: float = 1e-7
    max_iterations: int = 10_000
    line_search_tol: float = 1e-9
    #: mediator-side bound on a single round's movement along the announced
    #: direction; 0.4 reproduces the reference trajectories on the k=10
    #: triangle (see README)
    step_cap: float = 0.4

    def __post_init__(self):
        if self.convergence_tol < 1e-12:
            raise ValueError("convergence_tol must be >= 1e-12")
        if not 0 < self.max_iterations <= 10**6:
            raise ValueError("max_iterations must lie in (0, 10^6]")
        if self.line_search_tol <= 0:
            raise ValueError("line_search_tol must be positive")
        if self.step_cap <= 0:
            raise ValueError("step_cap must be positive")


@dataclass
class NegotiationTrace:
    """Settlement path with the per-step announcements and step lengths.

    points has one more row than steps; points[t+1] = points[t] +
    steps[t, 2] * directions[t] holds to rounding.
    """

    points: np.ndarray      # (n+1, 2)
    directions: np.ndarray  # (n, 2)
    steps: np.ndarray       # (n, 3): lambda1, lambda2, lambda*
    converged: bool

    @property
    def n_steps(self) -> int:
        return self.directions.shape[0]

    @property
    def settlement(self) -> Point:
        return Point.from_array(self.points[-1])

    def utilities(self, u: UtilitySpec) -> np.ndarray:
        """u evaluated at every trace point."""
        c = u.coeffs()
        return np.array([_kernels.util_value(c, u.k, p[0], p[1])
                         for p in self.points])


def bisector_direction(g1, g2) -> np.ndarray:
    """g1/(2|g1|) + g2/(2|g2|): the announced compromise direction.

    Unit norm iff the gradients are positively parallel, zero iff they are
    anti-parallel (the frontier signature).
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    n1 = math.hypot(g1[0], g1[1])
    n2 = math.hypot(g2[0], g2[1])
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateGradientError("bisector of a zero-norm gradient")
    return g1 / (2.0 * n1) + g2 / (2.0 * n2)


def preferred_step(u: UtilitySpec, x: Point, d, domain: TriangularDomain,
                   tol: float = 1e-9) -> float:
    """The party's utility-maximizing step along ray d from x.

    Zero when the directional derivative at x is non-positive; otherwise the
    argmax of t -> u(x + t*d) over the largest strictly feasible interval.
    """
    d = np.asarray(d, dtype=float)
    nd = math.hypot(d[0], d[1])
    if nd == 0.0:
        raise DegenerateGradientError("preferred step along a zero direction")
    if not domain.contains(x, strict=True):
        raise EvaluationError(f"start point {x} is not strictly interior")
    return _kernels.line_step(u.coeffs(), u.k, x.x1, x.x2, d[0], d[1],
                              domain.interior_margin, tol, math.inf)


def idm_step(u1: UtilitySpec, u2: UtilitySpec, x: Point,
             domain: TriangularDomain, cfg: IdmConfig = IdmConfig()):
    """One mediation round; returns (new point, direction, (l1, l2, l*)).

    On the frontier the gradients are anti-parallel, the announced direction
    vanishes and the point is returned unchanged.
    """
    g1 = u1.gradient(x)
    g2 = u2.gradient(x)
    d = bisector_direction(g1, g2)
    if math.hypot(d[0], d[1]) < 1e-14:
        return x, d, (0.0, 0.0, 0.0)
    args = (domain.interior_margin, cfg.line_search_tol, cfg.step_cap)
    l1 = _kernels.line_step(u1.coeffs(), u1.k, x.x1, x.x2, d[0], d[1], *args)
    l2 = _kernels.line_step(u2.coeffs(), u2.k, x.x1, x.x2, d[0], d[1], *args)
    ls = min(l1, l2)
    new = Point(x.x1 + ls * d[0], x.x2 + ls * d[1])
    return new, d, (l1, l2, ls)


def idm_run(u1: UtilitySpec, u2: UtilitySpec, x0: Point,
            domain: TriangularDomain, cfg: IdmConfig = IdmConfig()) -> NegotiationTrace:
    """Iterate idm_step from x0 until convergence or the round budget.

    Non-convergence is reported through the converged flag, not an error.
    """
    if not domain.contains(x0, strict=True):
        raise EvaluationError(f"start point {x0} is not strictly interior")
    n_max = cfg.max_iterations
    pts = np.empty((n_max + 1, 2))
    dirs = np.empty((n_max, 2))
    lams = np.empty((n_max, 3))
    n, status = _kernels.idm_trace(
        u1.coeffs(), u2.coeffs(), domain.k, x0.x1, x0.x2,
        domain.interior_margin, cfg.convergence_tol, cfg.line_search_tol,
        cfg.step_cap, n_max, pts, dirs, lams)
    if status == _kernels.IDM_DEGENERATE:
        raise DegenerateGradientError(
            f"zero-norm gradient on the trace at {Point.from_array(pts[n])}")
    return NegotiationTrace(points=pts[:n + 1].copy(),
                            directions=dirs[:n].copy(),
                            steps=lams[:n].copy(),
                            converged=status == _kernels.IDM_CONVERGED)
