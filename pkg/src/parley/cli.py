"""Command-line experiment harness.

Subcommands: idm, payoff, nin, mre-sweep, attack. Every command loads a
scenario (preset name or file), honors --seed, writes plot-ready CSVs plus a
manifest.json into --out-dir, and prints a short summary. Exit codes:
0 success, 1 numerical failure (non-convergence), 2 input error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import exports, manipulation, nin
from .domain import Point
from .errors import NonConvergenceError, ScenarioError
from .idm import IdmConfig, idm_run
from .manipulation import (best_response_gamma, build_payoff_game,
                           dominant_strategy_solution, invert_announcement,
                           paper_strategic_profile, best_response_profile,
                           recover_beta)
from .errors import RecoveryError
from .nin import NinConfig, RandomStream, SecretDistribution, mre_trial_errors, nin_run
from .scenario import PRESETS, load_scenario

PAPER_PRESET = "paper-triangle"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", default=PAPER_PRESET,
                        help="preset name (%s) or scenario file path"
                             % ", ".join(sorted(PRESETS)))
    parser.add_argument("--seed", type=int, default=1, help="root RNG seed")
    parser.add_argument("--out-dir", default="parley-out",
                        help="directory for CSV outputs and the manifest")
    parser.add_argument("--tol", type=float, default=1e-7,
                        help="convergence tolerance on the step displacement")
    parser.add_argument("--max-iter", type=int, default=10_000,
                        help="mediation round budget")
    parser.add_argument("--step-cap", type=float, default=0.4,
                        help="mediator bound on a single round's movement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parley",
        description="Two-party negotiation experiments: deterministic "
                    "improving-direction mediation, manipulation attacks, "
                    "and the noise-protected variant.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("idm", help="run one mediation and export the trace")
    _add_common(p)
    p.add_argument("--declare1", default="truthful",
                   help="party 1 declaration: truthful, strategic, or a "
                        "coefficient value (e.g. 7/3)")
    p.add_argument("--declare2", default="truthful",
                   help="party 2 declaration: truthful, strategic, or a "
                        "coefficient value")

    p = sub.add_parser("payoff", help="build the 2x2 strategic-form game")
    _add_common(p)

    p = sub.add_parser("nin", help="run noise-protected trials")
    _add_common(p)
    p.add_argument("--M", type=int, default=5, help="consecutive-failure bound")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--spread", type=float, default=nin.DEFAULT_SPREAD,
                   help="announcement noise as a fraction of gradient norm")

    p = sub.add_parser("mre-sweep", help="mean relative error across M values")
    _add_common(p)
    p.add_argument("--M", default="1..10",
                   help="single value or inclusive range like 1..10")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--spread", type=float, default=nin.DEFAULT_SPREAD)

    p = sub.add_parser("attack", help="invert an announcement and best-respond")
    _add_common(p)

    return parser


def _idm_config(args) -> IdmConfig:
    return IdmConfig(convergence_tol=args.tol, max_iterations=args.max_iter,
                     step_cap=args.step_cap)


def _nin_config(args, M: int) -> NinConfig:
    return NinConfig(M=M, seed=args.seed, step_cap=args.step_cap)


def _parse_declaration(text: str, which: int, scenario, cfg: IdmConfig):
    true = scenario.true1 if which == 1 else scenario.true2
    text = text.strip().lower()
    if text == "truthful":
        return true
    if text == "strategic":
        if scenario.label == PAPER_PRESET:
            profile = paper_strategic_profile(scenario.true1, scenario.true2)
        else:
            profile = best_response_profile(scenario.true1, scenario.true2,
                                            scenario.x0, scenario.domain, cfg)
        return profile.declared1 if which == 1 else profile.declared2
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            gamma = float(num) / float(den)
        else:
            gamma = float(text)
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(
            f"--declare{which} must be truthful, strategic, or a number; "
            f"got {text!r}")
    return manipulation._declared_family(true, gamma)


def _parse_m_range(text: str):
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if lo < 1 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        value = int(text)
        if value < 1:
            raise ValueError
        return [value]
    except ValueError:
        raise ScenarioError(f"--M must be a positive int or lo..hi range, got {text!r}")


def _finish(manifest: exports.RunManifest, out_dir: str, started: float) -> None:
    manifest.duration_seconds = time.perf_counter() - started
    manifest.write(os.path.join(out_dir, "manifest.json"))


def cmd_idm(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    cfg = _idm_config(args)
    d1 = _parse_declaration(args.declare1, 1, scenario, cfg)
    d2 = _parse_declaration(args.declare2, 2, scenario, cfg)
    trace = idm_run(d1, d2, scenario.x0, scenario.domain, cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    trace_path = os.path.join(args.out_dir, "trace.csv")
    exports.write_trace_csv(trace_path, trace, scenario.true1, scenario.true2)
    s = trace.settlement
    print(f"settlement: ({s.x1:.6f}, {s.x2:.6f})")
    print(f"true utilities: u1={scenario.true1.value(s):.6f} "
          f"u2={scenario.true2.value(s):.6f}")
    print(f"iterations: {trace.n_steps} converged: {trace.converged}")
    manifest = exports.RunManifest(
        command="idm", scenario_label=scenario.label,
        config={"tol": args.tol, "max_iter": args.max_iter,
                "step_cap": args.step_cap, "declare1": args.declare1,
                "declare2": args.declare2},
        seed=args.seed, outputs=["trace.csv"])
    _finish(manifest, args.out_dir, started)
    if not trace.converged:
        raise NonConvergenceError(
            f"no convergence within {cfg.max_iterations} iterations")
    return 0


def cmd_payoff(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    cfg = _idm_config(args)
    if scenario.label == PAPER_PRESET:
        profile = paper_strategic_profile(scenario.true1, scenario.true2)
    else:
        profile = best_response_profile(scenario.true1, scenario.true2,
                                        scenario.x0, scenario.domain, cfg)
    game = build_payoff_game(profile, scenario.x0, scenario.domain, cfg)
    dom = dominant_strategy_solution(game)
    os.makedirs(args.out_dir, exist_ok=True)
    exports.write_payoff_csv(os.path.join(args.out_dir, "payoff.csv"), game)
    report = exports.payoff_report_text(game, dom)
    with open(os.path.join(args.out_dir, "payoff_report.txt"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(report)
    print(report, end="")
    manifest = exports.RunManifest(
        command="payoff", scenario_label=scenario.label,
        config={"tol": args.tol, "max_iter": args.max_iter,
                "step_cap": args.step_cap,
                "gamma1": profile.declared1.a3, "gamma2": profile.declared2.a3},
        seed=args.seed, outputs=["payoff.csv", "payoff_report.txt"])
    _finish(manifest, args.out_dir, started)
    return 0


def cmd_nin(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    if args.trials < 1:
        raise ScenarioError("--trials must be >= 1")
    cfg = _nin_config(args, args.M)
    dist = SecretDistribution(args.spread)
    os.makedirs(args.out_dir, exist_ok=True)
    stats = []
    outputs = ["trials.csv"]
    for i in range(args.trials):
        rng = RandomStream(args.seed, i)
        keep = i < 10
        st = nin_run(scenario.true1, scenario.true2, scenario.x0, dist, dist,
                     scenario.domain, cfg, rng, keep_path=keep)
        stats.append(st)
        if keep:
            name = f"nin_traj_{i:02d}.csv"
            exports.write_trajectory_csv(os.path.join(args.out_dir, name), st.path)
            outputs.append(name)
    exports.write_trials_csv(os.path.join(args.out_dir, "trials.csv"), stats, args.M)
    mre = math.fsum(s.relative_error for s in stats) / len(stats)
    print(f"trials: {args.trials} M: {args.M} spread: {args.spread}")
    print(f"mean relative error: {mre:.6f}")
    print(f"mean rounds: {math.fsum(s.total_rounds for s in stats) / len(stats):.1f}")
    manifest = exports.RunManifest(
        command="nin", scenario_label=scenario.label,
        config={"M": args.M, "trials": args.trials, "spread": args.spread,
                "step_cap": args.step_cap}, seed=args.seed, outputs=outputs)
    _finish(manifest, args.out_dir, started)
    return 0


def cmd_mre_sweep(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    if args.trials < 1:
        raise ScenarioError("--trials must be >= 1")
    m_values = _parse_m_range(args.M)
    dist = SecretDistribution(args.spread)
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    outputs = ["mre_sweep.csv"]
    for m in m_values:
        cfg = _nin_config(args, m)
        errors = mre_trial_errors(scenario, m, args.trials, cfg, args.seed,
                                  dist, dist)
        mre = math.fsum(errors) / len(errors)
        stderr = (float(np.std(errors, ddof=1)) / math.sqrt(len(errors))
                  if len(errors) > 1 else None)
        rows.append((m, mre, stderr, args.trials, args.seed))
        name = f"hist_M{m}.csv"
        exports.write_histogram_csv(os.path.join(args.out_dir, name), errors)
        outputs.append(name)
        se_text = "" if stderr is None else f" +- {stderr:.6f}"
        print(f"M={m}: MRE={mre:.6f}{se_text}")
    exports.write_mre_sweep_csv(os.path.join(args.out_dir, "mre_sweep.csv"), rows)
    # context: how far the strategic deterministic settlements sit from the
    # true frontier, for comparison against the NIN numbers above
    if scenario.label == PAPER_PRESET:
        cfg_idm = _idm_config(args)
        profile = paper_strategic_profile(scenario.true1, scenario.true2)
        game = build_payoff_game(profile, scenario.x0, scenario.domain, cfg_idm)
        from .domain import pareto_frontier
        frontier = pareto_frontier(scenario.true1, scenario.true2)
        d0 = frontier.distance_to(scenario.x0)
        dists = [frontier.distance_to(game.settlements[i][j]) / d0
                 for i in range(2) for j in range(2) if (i, j) != (0, 0)]
        print(f"strategic mediation relative distances to the true frontier: "
              f"{', '.join(f'{d:.4f}' for d in dists)}")
    manifest = exports.RunManifest(
        command="mre-sweep", scenario_label=scenario.label,
        config={"M": args.M, "trials": args.trials, "spread": args.spread,
                "step_cap": args.step_cap}, seed=args.seed, outputs=outputs)
    _finish(manifest, args.out_dir, started)
    return 0


def cmd_attack(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    cfg = _idm_config(args)
    trace = idm_run(scenario.true1, scenario.true2, scenario.x0,
                    scenario.domain, cfg)
    recovered = None
    attempts = 0
    for t in range(trace.n_steps):
        attempts += 1
        x = Point.from_array(trace.points[t])
        own = scenario.true1.gradient(x)
        v = invert_announcement(trace.directions[t], own)
        try:
            recovered = recover_beta(v, x, scenario.domain.k)
            break
        except RecoveryError:
            continue
    if recovered is None:
        raise NonConvergenceError("recovery failed at every trace point")
    gamma_star, payoff_star = best_response_gamma(
        scenario.true1, scenario.true2, scenario.x0, scenario.domain, cfg)
    truthful_payoff = scenario.true1.value(trace.settlement)
    report = exports.attack_report_text(recovered, attempts, gamma_star,
                                        payoff_star, truthful_payoff)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "attack_report.txt"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(report)
    print(report, end="")
    manifest = exports.RunManifest(
        command="attack", scenario_label=scenario.label,
        config={"tol": args.tol, "max_iter": args.max_iter,
                "step_cap": args.step_cap},
        seed=args.seed, outputs=["attack_report.txt"])
    _finish(manifest, args.out_dir, started)
    return 0


HANDLERS = {
    "idm": cmd_idm,
    "payoff": cmd_payoff,
    "nin": cmd_nin,
    "mre-sweep": cmd_mre_sweep,
    "attack": cmd_attack,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
