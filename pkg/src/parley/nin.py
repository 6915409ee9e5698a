"""Noise-protected negotiation: stochastic announcements with a veto rule.

Instead of its gradient, each party announces a random vector drawn from a
secret distribution whose mean is the gradient. The mediator bisects the two
announcements; a party vetoes (declares a zero step) whenever the announced
direction would lower its true utility. The loop ends after M consecutive
vetoed rounds, which on the frontier happens surely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .domain import ParetoSegment, Point, TriangularDomain, UtilitySpec, pareto_frontier
from .errors import DegenerateGradientError, EvaluationError

#: default stochastic-answer spread: per-component standard deviation of the
#: announcement noise as a fraction of the local gradient norm
DEFAULT_SPREAD = 0.25


@dataclass(frozen=True)
class SecretDistribution:
    """Isotropic announcement noise; spread 0 reduces to gradient answers."""

    spread_ratio: float = DEFAULT_SPREAD

    def __post_init__(self):
        if self.spread_ratio < 0:
            raise ValueError(f"spread_ratio must be >= 0, got {self.spread_ratio}")


@dataclass(frozen=True)
class NinConfig:
    M: int = 5
    movement_threshold: float = 1e-9
    max_total_rounds: int = 100_000
    seed: int = 1
    line_search_tol: float = 1e-9
    step_cap: float = 0.4

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.movement_threshold < 1e-12:
            raise ValueError("movement_threshold must be >= 1e-12")
        if self.max_total_rounds < 1:
            raise ValueError("max_total_rounds must be >= 1")
        if self.line_search_tol <= 0 or self.step_cap <= 0:
            raise ValueError("line_search_tol and step_cap must be positive")


@dataclass
class TrialStats:
    settlement: Point
    accepted_steps: int
    total_rounds: int
    final_distance: float
    relative_error: float
    exhausted: bool = False
    path: Optional[np.ndarray] = None


class RandomStream:
    """Deterministic splitmix64 stream; (seed, index) pairs are independent."""

    def __init__(self, seed: int, index: int = 0):
        self.seed = int(seed)
        self.index = int(index)
        self._state = np.empty(1, dtype=np.uint64)
        self._state[0] = _kernels.stream_state(_kernels.as_seed(seed), index)

    @property
    def state(self) -> np.ndarray:
        return self._state

    def standard_normal_pair(self):
        return _kernels.std_normal_pair(self._state)


def sample_direction(u: UtilitySpec, x: Point, dist: SecretDistribution,
                     rng: RandomStream) -> np.ndarray:
    """One announcement: the gradient plus isotropic noise, never near-zero."""
    g = u.gradient(x)
    n = math.hypot(g[0], g[1])
    if n == 0.0:
        raise DegenerateGradientError(f"zero gradient at {x}")
    if dist.spread_ratio == 0.0:
        return g
    sigma = dist.spread_ratio * n
    for _ in range(100):
        e1, e2 = rng.standard_normal_pair()
        v = np.array([g[0] + sigma * e1, g[1] + sigma * e2])
        if math.hypot(v[0], v[1]) >= 1e-12:
            return v
    raise DegenerateGradientError("announcement sampling degenerated")


def nin_map(u1: UtilitySpec, u2: UtilitySpec, x: Point,
            dist1: SecretDistribution, dist2: SecretDistribution,
            domain: TriangularDomain, cfg: NinConfig,
            rng: RandomStream) -> Point:
    """One stochastic round from x; failed rounds return x itself.

    A round fails when either party vetoes the sampled direction (true
    directional derivative <= 0) or the joint step stays below the movement
    threshold, so points on the frontier are fixed with probability one.
    """
    if not domain.contains(x, strict=True):
        raise EvaluationError(f"round point {x} is not strictly interior")
    nx, ny, ls = _kernels.nin_round(
        u1.coeffs(), u2.coeffs(), domain.k, x.x1, x.x2,
        domain.interior_margin, cfg.line_search_tol, cfg.step_cap,
        dist1.spread_ratio, dist2.spread_ratio, rng.state)
    if ls <= cfg.movement_threshold:
        return x
    return Point(nx, ny)


def nin_run(u1: UtilitySpec, u2: UtilitySpec, x0: Point,
            dist1: SecretDistribution, dist2: SecretDistribution,
            domain: TriangularDomain, cfg: NinConfig,
            rng: Optional[RandomStream] = None,
            keep_path: bool = False) -> TrialStats:
    """Iterate rounds from x0 until M consecutive failures (or the budget).

    Statistics are measured against the true-pair frontier. Identical
    (inputs, seed) reproduce identical stats bit for bit.
    """
    if not domain.contains(x0, strict=True):
        raise EvaluationError(f"start point {x0} is not strictly interior")
    if rng is None:
        rng = RandomStream(cfg.seed)
    frontier = pareto_frontier(u1, u2)
    if keep_path:
        traj = np.empty((cfg.max_total_rounds + 1, 2))
    else:
        traj = np.empty((0, 2))
    fx, fy, accepted, total, fails = _kernels.nin_loop(
        u1.coeffs(), u2.coeffs(), domain.k, x0.x1, x0.x2,
        domain.interior_margin, cfg.line_search_tol, cfg.step_cap,
        dist1.spread_ratio, dist2.spread_ratio, cfg.M,
        cfg.movement_threshold, cfg.max_total_rounds, rng.state, traj)
    settlement = Point(fx, fy)
    final = frontier.distance_to(settlement)
    d0 = frontier.distance_to(x0)
    rel = final / d0 if d0 > 0 else 0.0
    path = traj[:accepted + 1].copy() if keep_path else None
    return TrialStats(settlement=settlement, accepted_steps=accepted,
                      total_rounds=total, final_distance=final,
                      relative_error=rel, exhausted=fails < cfg.M, path=path)


def mre_trial_errors(scenario, M: int, n: int, cfg: NinConfig,
                     seed: Optional[int] = None,
                     dist1: Optional[SecretDistribution] = None,
                     dist2: Optional[SecretDistribution] = None) -> np.ndarray:
    """Relative errors of n independent trials (trial i = stream i of the seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    dist1 = dist1 or SecretDistribution()
    dist2 = dist2 or SecretDistribution()
    root = _kernels.as_seed(seed if seed is not None else cfg.seed)
    f = pareto_frontier(scenario.true1, scenario.true2)
    out = np.empty(n)
    _kernels.mre_errors(
        scenario.true1.coeffs(), scenario.true2.coeffs(), scenario.domain.k,
        scenario.x0.x1, scenario.x0.x2, scenario.domain.interior_margin,
        cfg.line_search_tol, cfg.step_cap, dist1.spread_ratio,
        dist2.spread_ratio, M, cfg.movement_threshold, cfg.max_total_rounds,
        root, f.b1.x1, f.b1.x2, f.b2.x1, f.b2.x2, out)
    return out


def mre_estimate(scenario, M: int, n: int, cfg: NinConfig,
                 seed: Optional[int] = None,
                 dist1: Optional[SecretDistribution] = None,
                 dist2: Optional[SecretDistribution] = None) -> float:
    """Mean relative error over n seeded trials (order-stable summation)."""
    errors = mre_trial_errors(scenario, M, n, cfg, seed, dist1, dist2)
    return math.fsum(errors) / len(errors)


def improve_probability(u1: UtilitySpec, u2: UtilitySpec, x: Point,
                        dist1: SecretDistribution, dist2: SecretDistribution,
                        n: int, seed: int,
                        domain: Optional[TriangularDomain] = None,
                        cfg: Optional[NinConfig] = None) -> float:
    """Monte-Carlo estimate of the chance that a single round at x moves."""
    domain = domain or TriangularDomain(u1.k)
    cfg = cfg or NinConfig()
    count = _kernels.improve_count(
        u1.coeffs(), u2.coeffs(), domain.k, x.x1, x.x2,
        domain.interior_margin, cfg.line_search_tol, cfg.step_cap,
        dist1.spread_ratio, dist2.spread_ratio, cfg.movement_threshold,
        n, _kernels.as_seed(seed))
    return count / n


def premature_stop_frequency(u1: UtilitySpec, u2: UtilitySpec, x0: Point,
                             dist1: SecretDistribution, dist2: SecretDistribution,
                             M: int, n: int, seed: int,
                             domain: Optional[TriangularDomain] = None,
                             cfg: Optional[NinConfig] = None) -> float:
    """Fraction of n trials whose first M rounds at x0 all fail.

    That event is the negotiation ending at the start point itself; its
    probability is (1 - eps)^M for the single-round improvement chance eps.
    """
    domain = domain or TriangularDomain(u1.k)
    cfg = cfg or NinConfig()
    count = _kernels.stop_at_start_count(
        u1.coeffs(), u2.coeffs(), domain.k, x0.x1, x0.x2,
        domain.interior_margin, cfg.line_search_tol, cfg.step_cap,
        dist1.spread_ratio, dist2.spread_ratio, cfg.movement_threshold,
        M, n, _kernels.as_seed(seed))
    return count / n
