"""Plot-ready CSV exports and the per-run manifest.

All CSVs carry a header row, '.' decimal separator, LF line endings. Floats
are written with repr (shortest round-trip form) so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import List, Sequence

import numpy as np

from .manipulation import DominanceResult, PayoffGame, is_prisoners_dilemma


def _f(x) -> str:
    return repr(float(x))


def _write_rows(path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_trace_csv(path, trace, u1, u2) -> None:
    """Full mediation trace; step columns are empty on the final row."""
    vals1 = trace.utilities(u1)
    vals2 = trace.utilities(u2)
    rows = []
    for t, p in enumerate(trace.points):
        if t < trace.n_steps:
            d = trace.directions[t]
            lam = trace.steps[t]
            step_cols = [_f(d[0]), _f(d[1]), _f(lam[0]), _f(lam[1]), _f(lam[2])]
        else:
            step_cols = ["", "", "", "", ""]
        rows.append([str(t), _f(p[0]), _f(p[1]), *step_cols,
                     _f(vals1[t]), _f(vals2[t])])
    _write_rows(path, ["t", "x1", "x2", "g1", "g2", "lambda1", "lambda2",
                       "lambda_star", "u1", "u2"], rows)


def write_trajectory_csv(path, points: np.ndarray) -> None:
    rows = [[str(t), _f(p[0]), _f(p[1])] for t, p in enumerate(points)]
    _write_rows(path, ["t", "x1", "x2"], rows)


def write_trials_csv(path, stats_list, M: int) -> None:
    rows = [[str(i), str(M), _f(s.settlement.x1), _f(s.settlement.x2),
             _f(s.relative_error), str(s.total_rounds)]
            for i, s in enumerate(stats_list)]
    _write_rows(path, ["trial", "M", "settlement_x1", "settlement_x2",
                       "rel_error", "rounds"], rows)


def write_mre_sweep_csv(path, rows) -> None:
    """rows: iterables of (M, mre, stderr or None, n, seed)."""
    out = [[str(m), _f(mre), "" if se is None else _f(se), str(n), str(seed)]
           for m, mre, se, n, seed in rows]
    _write_rows(path, ["M", "mre", "stderr", "n", "seed"], out)


def write_histogram_csv(path, errors: np.ndarray, n_bins: int = 20) -> None:
    top = float(errors.max()) if len(errors) and errors.max() > 0 else 1.0
    counts, edges = np.histogram(errors, bins=n_bins, range=(0.0, top))
    rows = [[_f(edges[i]), _f(edges[i + 1]), str(int(c))]
            for i, c in enumerate(counts)]
    _write_rows(path, ["bin_lo", "bin_hi", "count"], rows)


LABELS = ("truthful", "strategic")


def write_payoff_csv(path, game: PayoffGame) -> None:
    """Rows are party 1's strategy, columns party 2's; cells are quoted pairs."""
    rows = []
    for i, label in enumerate(LABELS):
        cells = [f'"({_f(game.cells[i, j, 0])}, {_f(game.cells[i, j, 1])})"'
                 for j in range(2)]
        rows.append([label, *cells])
    _write_rows(path, ["party1\\party2", *LABELS], rows)


def payoff_report_text(game: PayoffGame, dom: DominanceResult) -> str:
    lines = ["Payoff table (true utilities; rows = party 1, cols = party 2)", ""]
    header = f"{'':>12}" + "".join(f"{c:>22}" for c in LABELS)
    lines.append(header)
    for i, label in enumerate(LABELS):
        cells = "".join(
            f"{f'({game.cells[i, j, 0]:.4f}, {game.cells[i, j, 1]:.4f})':>22}"
            for j in range(2))
        lines.append(f"{label:>12}" + cells)
    lines.append("")
    spread = float(np.ptp(game.cells))
    if spread < 1e-12:
        lines.append("All cells identical: no strategic spread.")
    if dom.cell is None:
        lines.append("Dominant-strategy cell: none")
    else:
        name = f"({LABELS[dom.cell[0]]}, {LABELS[dom.cell[1]]})"
        lines.append(f"Dominant-strategy cell: {name}"
                     + (" (tie, broken toward truthful)" if dom.tie else ""))
        truthful = game.cells[0, 0]
        dominant = game.cells[dom.cell]
        if dom.cell != (0, 0) and bool(np.all(truthful > dominant)):
            lines.append("The truthful cell Pareto-dominates the dominant cell.")
    pd = is_prisoners_dilemma(game)
    lines.append(f"Prisoner's-Dilemma structure: {'yes' if pd else 'no'}")
    return "\n".join(lines) + "\n"


def attack_report_text(recovered_beta: float, attempts: int, gamma_star: float,
                       payoff_star: float, truthful_payoff: float) -> str:
    lines = [
        "Announcement-inversion attack (party 1 eavesdropping on the mediator)",
        f"recovered beta2: {recovered_beta!r} (after {attempts} attempt(s))",
        f"best-response gamma*: {gamma_star!r}",
        f"payoff at gamma*: {payoff_star!r}",
        f"truthful payoff: {truthful_payoff!r}",
        f"payoff lift: {payoff_star - truthful_payoff!r}",
    ]
    return "\n".join(lines) + "\n"


@dataclass
class RunManifest:
    command: str
    scenario_label: str
    config: dict
    seed: int
    outputs: List[str] = field(default_factory=list)
    duration_seconds: float = 0.0

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
