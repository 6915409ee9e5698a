"""Two-party negotiation over continuous issues.

Deterministic improving-direction mediation, the manipulation attacks it
admits, and the noise-protected stochastic variant, plus a CLI harness that
emits plot-ready experiment data.
"""

from ._kernels import NUMBA_ENABLED
from .domain import (ParetoSegment, Point, TriangularDomain, UtilitySpec,
                     pareto_frontier)
from .errors import (DegenerateGradientError, EvaluationError,
                     NegotiationError, NonConvergenceError, RecoveryError,
                     ScenarioError, ShapeError)
from .idm import (IdmConfig, NegotiationTrace, bisector_direction, idm_run,
                  idm_step, preferred_step)
from .manipulation import (DominanceResult, PayoffGame, StrategicProfile,
                           best_response_gamma, best_response_profile,
                           build_payoff_game, dominant_strategy_solution,
                           invert_announcement, is_prisoners_dilemma,
                           paper_strategic_profile, recover_beta,
                           recover_beta_from_samples)
from .nin import (NinConfig, RandomStream, SecretDistribution, TrialStats,
                  improve_probability, mre_estimate, mre_trial_errors,
                  nin_map, nin_run, premature_stop_frequency,
                  sample_direction)
from .scenario import PRESETS, Scenario, load_scenario, parse_scenario_text

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "Point", "TriangularDomain", "UtilitySpec", "ParetoSegment",
    "pareto_frontier",
    "NegotiationError", "EvaluationError", "ShapeError",
    "DegenerateGradientError", "RecoveryError", "ScenarioError",
    "NonConvergenceError",
    "IdmConfig", "NegotiationTrace", "bisector_direction", "preferred_step",
    "idm_step", "idm_run",
    "StrategicProfile", "PayoffGame", "DominanceResult",
    "invert_announcement", "recover_beta", "recover_beta_from_samples",
    "best_response_gamma", "best_response_profile", "paper_strategic_profile",
    "build_payoff_game", "dominant_strategy_solution", "is_prisoners_dilemma",
    "SecretDistribution", "NinConfig", "TrialStats", "RandomStream",
    "sample_direction", "nin_map", "nin_run", "mre_trial_errors",
    "mre_estimate", "improve_probability", "premature_stop_frequency",
    "Scenario", "PRESETS", "load_scenario", "parse_scenario_text",
    "__version__",
]
