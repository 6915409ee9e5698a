"""Executable manipulation attacks against the deterministic mediator.

Three pieces: inverting a mediator announcement back to the opponent's
normalized gradient, recovering the opponent's utility coefficient from it,
and choosing a misreported coefficient that improves the settlement for the
misreporting party. The 2x2 strategic-form game built from those pieces
exhibits the familiar dominated-equilibrium inefficiency.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .domain import Point, TriangularDomain, UtilitySpec
from .errors import DegenerateGradientError, RecoveryError, ShapeError
from .idm import IdmConfig, idm_run

logger = logging.getLogger(__name__)

#: strategic declarations behind the reference payoff table on the k=10
#: triangle: party 1's published misreport, and the party-2 coefficient
#: consistent with the published cells (not the sweep optimum; see README)
PAPER_GAMMA1 = 7.0 / 3.0
PAPER_GAMMA2 = 1.5


@dataclass(frozen=True)
class StrategicProfile:
    declared1: UtilitySpec
    declared2: UtilitySpec
    true1: UtilitySpec
    true2: UtilitySpec

    def __post_init__(self):
        ks = {self.declared1.k, self.declared2.k, self.true1.k, self.true2.k}
        if len(ks) != 1:
            raise ValueError(f"all specs must share one resource cap, got {ks}")


@dataclass
class PayoffGame:
    """True payoffs of the four declared pairs.

    cells[i, j] = (payoff1, payoff2) with i = party 1's strategy and
    j = party 2's strategy; index 0 is truthful, 1 is strategic.
    """

    cells: np.ndarray                      # (2, 2, 2)
    settlements: List[List[Point]]         # [i][j]


@dataclass(frozen=True)
class DominanceResult:
    cell: Optional[Tuple[int, int]]
    tie: bool = False


def invert_announcement(announced, own_gradient) -> np.ndarray:
    """Opponent's normalized gradient from a bisector announcement."""
    own = np.asarray(own_gradient, dtype=float)
    n = math.hypot(own[0], own[1])
    if n == 0.0:
        raise DegenerateGradientError("cannot invert with a zero own gradient")
    return 2.0 * np.asarray(announced, dtype=float) - own / n


def recover_beta(v, x: Point, k: float) -> float:
    """Opponent coefficient from its normalized gradient at x.

    The opponent's gradient for shape (0, 1, b) is (-b/s, 1/x2 - b/s) with
    s = k - x1 - x2; requiring it parallel to v is linear in b.
    """
    v = np.asarray(v, dtype=float)
    s = k - x.x1 - x.x2
    denom = x.x2 * (v[0] - v[1])
    if abs(denom) < 1e-12:
        raise RecoveryError(f"announcement unresolvable at {x} (zero denominator)")
    return float(s * v[0] / denom)


def recover_beta_from_samples(samples: Sequence[Tuple[Point, np.ndarray]],
                              k: float) -> float:
    """Least-squares coefficient from several (point, normalized gradient) pairs.

    An eavesdropper who slows convergence can collect one pair per round;
    each pair contributes the linear residual b*(v1 - v2)/s - v1/x2.
    """
    a = []
    b = []
    for x, v in samples:
        s = k - x.x1 - x.x2
        a.append((v[0] - v[1]) / s)
        b.append(v[0] / x.x2)
    a = np.asarray(a)
    b = np.asarray(b)
    denom = float(a @ a)
    if denom < 1e-24:
        raise RecoveryError("all samples degenerate (zero design vector)")
    return float(a @ b) / denom


def _declared_family(true_self: UtilitySpec, gamma: float) -> UtilitySpec:
    """Misreport that keeps the own-quantity coefficient, swapping the shared one."""
    if true_self.a1 > 0 and true_self.a2 == 0:
        return UtilitySpec(true_self.a1, 0.0, gamma, true_self.k)
    if true_self.a2 > 0 and true_self.a1 == 0:
        return UtilitySpec(0.0, true_self.a2, gamma, true_self.k)
    raise ShapeError(f"misreport family needs a perfect-competition shape, got {true_self}")


def _ordered_pair(true_self: UtilitySpec, declared: UtilitySpec,
                  opponent: UtilitySpec):
    """Keep party 1 (the a1 party) first regardless of who is sweeping."""
    if true_self.a1 > 0:
        return declared, opponent
    return opponent, declared


def best_response_gamma(true_self: UtilitySpec, opponent: UtilitySpec,
                        x0: Point, domain: TriangularDomain,
                        cfg: IdmConfig = IdmConfig(),
                        gamma_range: Tuple[float, float] = (0.05, 20.0),
                        grid_points: int = 200) -> Tuple[float, float]:
    """Misreported coefficient maximizing the true settlement utility.

    Sweeps a log grid over gamma_range, then refines the best bracket by
    golden section. Non-converged declarations are skipped and logged.
    Returns (gamma_star, true payoff at gamma_star).
    """
    cache: dict = {}

    def payoff(gamma: float) -> float:
        key = round(gamma, 12)
        if key not in cache:
            ua, ub = _ordered_pair(true_self, _declared_family(true_self, gamma),
                                   opponent)
            trace = idm_run(ua, ub, x0, domain, cfg)
            if not trace.converged:
                logger.warning("sweep skipped gamma=%g: no convergence", gamma)
                cache[key] = -math.inf
            else:
                cache[key] = true_self.value(trace.settlement)
        return cache[key]

    lo, hi = gamma_range
    if not 0 < lo < hi:
        raise ValueError(f"gamma_range must satisfy 0 < lo < hi, got {gamma_range}")
    grid = np.geomspace(lo, hi, grid_points)
    values = [payoff(g) for g in grid]
    i = int(np.argmax(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid_points - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = payoff(c), payoff(d)
    while b - a > 1e-6:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = payoff(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = payoff(d)
    candidates = [grid[i], 0.5 * (a + b)]
    best = max(candidates, key=payoff)
    return float(best), float(payoff(best))


def paper_strategic_profile(true1: UtilitySpec, true2: UtilitySpec) -> StrategicProfile:
    """The reference strategic declarations for the canonical scenario."""
    return StrategicProfile(
        declared1=_declared_family(true1, PAPER_GAMMA1),
        declared2=_declared_family(true2, PAPER_GAMMA2),
        true1=true1, true2=true2)


def best_response_profile(true1: UtilitySpec, true2: UtilitySpec, x0: Point,
                          domain: TriangularDomain,
                          cfg: IdmConfig = IdmConfig()) -> StrategicProfile:
    """Strategic declarations from each party's best-response sweep."""
    g1, _ = best_response_gamma(true1, true2, x0, domain, cfg)
    g2, _ = best_response_gamma(true2, true1, x0, domain, cfg)
    return StrategicProfile(
        declared1=_declared_family(true1, g1),
        declared2=_declared_family(true2, g2),
        true1=true1, true2=true2)


def build_payoff_game(profile: StrategicProfile, x0: Point,
                      domain: TriangularDomain,
                      cfg: IdmConfig = IdmConfig()) -> PayoffGame:
    """Run the mediation for each declared pair; payoffs are true utilities."""
    options1 = (profile.true1, profile.declared1)
    options2 = (profile.true2, profile.declared2)
    cache: dict = {}
    cells = np.empty((2, 2, 2))
    settlements: List[List[Point]] = [[None, None], [None, None]]
    for i, d1 in enumerate(options1):
        for j, d2 in enumerate(options2):
            key = (d1.coeffs().tobytes(), d2.coeffs().tobytes())
            if key not in cache:
                trace = idm_run(d1, d2, x0, domain, cfg)
                cache[key] = trace.settlement
            settlement = cache[key]
            settlements[i][j] = settlement
            cells[i, j, 0] = profile.true1.value(settlement)
            cells[i, j, 1] = profile.true2.value(settlement)
    return PayoffGame(cells=cells, settlements=settlements)


def dominant_strategy_solution(game: PayoffGame) -> DominanceResult:
    """Cell where each strategy weakly dominates its alternative, if any.

    Exact ties go to the truthful index and are flagged.
    """

    def best(player: int) -> Optional[Tuple[int, bool]]:
        p = game.cells[..., player]
        if player == 1:
            p = p.T  # rows become the chooser's strategies
        truthful_dominates = bool(np.all(p[0] >= p[1]))
        strategic_dominates = bool(np.all(p[1] >= p[0]))
        if truthful_dominates and strategic_dominates:
            return 0, True
        if truthful_dominates:
            return 0, False
        if strategic_dominates:
            return 1, False
        return None

    r1 = best(0)
    r2 = best(1)
    if r1 is None or r2 is None:
        return DominanceResult(cell=None)
    return DominanceResult(cell=(r1[0], r2[0]), tie=r1[1] or r2[1])


def is_prisoners_dilemma(game: PayoffGame) -> bool:
    """Dominant cell exists, differs from truthful, and is Pareto-dominated by it."""
    dom = dominant_strategy_solution(game)
    if dom.cell is None or dom.cell == (0, 0):
        return False
    truthful = game.cells[0, 0]
    dominant = game.cells[dom.cell]
    return bool(np.all(truthful > dominant))
