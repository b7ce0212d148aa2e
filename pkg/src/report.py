"""Text and JSON rendering of validation, enumeration, Cesàro, solve and simulation results.

JSON carries every number at full precision (repr round-trips); text uses six
significant digits.  Neither contains timestamps.
"""

import json
from typing import List, Optional

import numpy as np
import pandas as pd

from src import __version__
from src.game_model import GameSpec, ValidationReport
from src.markov_analysis import CesaroResult
from src.strategy_space import PureStationaryStrategy
from src.workflows.game_solver import SolveReport
from src.workflows.trajectory_simulator import PayoffEstimate
from utils.utils import fmt

BANNER = f"pismg {__version__}"


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _with_banner(lines: List[str], banner: bool) -> str:
    if banner:
        lines = [BANNER, ""] + lines
    return "\n".join(lines) + "\n"


def _matrix_text(entries: np.ndarray, index: List[str], columns: List[str]) -> str:
    df = pd.DataFrame(entries, index=index, columns=columns)
    return df.to_string(float_format=fmt)


def _strategy_dict(spec: GameSpec, strategy: PureStationaryStrategy) -> dict:
    return {
        "ordinal": strategy.ordinal,
        "label": strategy.label,
        "choice": {str(s): label for s, label in strategy.describe(spec).items()},
    }


def _choice_text(spec: GameSpec, strategy: PureStationaryStrategy) -> str:
    described = strategy.describe(spec)
    if not described:
        return "(no controlled states)"
    return ", ".join(f"{s}:{label}" for s, label in described.items())


# -------------------------
# validate
# -------------------------
def validation_json(spec: GameSpec, report: ValidationReport) -> dict:
    return {
        "game": spec.name,
        "states": spec.n,
        "s1": list(report.s1),
        "s2": list(report.s2),
        "d": {str(s): c for s, c in report.d.items()},
        "t": {str(s): c for s, c in report.t.items()},
        "d1": report.d1,
        "d2": report.d2,
        "warnings": list(report.warnings),
    }


def validation_text(spec: GameSpec, report: ValidationReport, banner: bool = True) -> str:
    lines = [
        f"game: {spec.name}",
        f"states: {spec.n}",
        f"S1 (player I): {list(report.s1)}  actions d = {[report.d[s] for s in report.s1]}",
        f"S2 (player II): {list(report.s2)}  actions t = {[report.t[s] for s in report.s2]}",
        f"D1 = {report.d1}, D2 = {report.d2}",
        "valid",
    ]
    lines += [f"warning: {w}" for w in report.warnings]
    return _with_banner(lines, banner)


# -------------------------
# enumerate
# -------------------------
def enumeration_json(spec: GameSpec, fs, gs, tables: bool) -> dict:
    out = {"game": spec.name, "d1": len(fs), "d2": len(gs)}
    if tables:
        out["maximiser"] = [_strategy_dict(spec, f) for f in fs]
        out["minimiser"] = [_strategy_dict(spec, g) for g in gs]
    return out


def enumeration_text(spec: GameSpec, fs, gs, tables: bool, banner: bool = True) -> str:
    lines = [f"game: {spec.name}", f"D1 = {len(fs)}, D2 = {len(gs)}"]
    if tables:
        lines.append("")
        lines.append("player I strategies:")
        lines += [f"  {f.label}: {_choice_text(spec, f)}" for f in fs]
        lines.append("player II strategies:")
        lines += [f"  {g.label}: {_choice_text(spec, g)}" for g in gs]
    return _with_banner(lines, banner)


# -------------------------
# cesaro
# -------------------------
def cesaro_diagnostics(result: CesaroResult) -> dict:
    out = {"method": result.method, "converged": result.converged}
    if result.m1 is not None:
        out["m1"] = result.m1
    if result.iterations is not None:
        out["iterations"] = result.iterations
    if result.decomposition is not None:
        chain = result.decomposition
        out["recurrent_classes"] = [[i + 1 for i in c] for c in chain.recurrent_classes]
        out["transient"] = [i + 1 for i in chain.transient]
    if result.notes:
        out["notes"] = list(result.notes)
    return out


# -------------------------
# solve
# -------------------------
def solve_json(spec: GameSpec, report: SolveReport, emit_matrices: bool = False) -> dict:
    diagnostics = dict(report.diagnostics)
    diagnostics["failed_2x2"] = {str(s): list(quad) for s, quad in diagnostics.get("failed_2x2", {}).items()}

    out = {
        "game": spec.name,
        "method": report.method,
        "value": [float(v) for v in report.value],
        "maximiser": {str(s): f.ordinal for s, f in report.maximiser.per_initial_state.items()},
        "minimiser": {str(s): g.ordinal for s, g in report.minimiser.per_initial_state.items()},
        "saddles": [
            {
                "state": sol.matrix.initial_state,
                "row": sol.saddle.row,
                "col": sol.saddle.col,
                "value": sol.saddle.value,
                "count": len(sol.saddle.all_saddles),
                "cells": [list(c) for c in sol.saddle.all_saddles],
                "certificate_2x2": sol.saddle.certificate_2x2,
            }
            for sol in report.per_state
        ],
        "strategies": {
            "maximiser": [_strategy_dict(spec, f) for f in report.strategies_max],
            "minimiser": [_strategy_dict(spec, g) for g in report.strategies_min],
        },
        "diagnostics": diagnostics,
    }
    if emit_matrices:
        out["matrices"] = {str(sol.matrix.initial_state): sol.matrix.entries.tolist() for sol in report.per_state}
    return out


def solve_text(spec: GameSpec, report: SolveReport, emit_matrices: bool = False, banner: bool = True) -> str:
    diag = report.diagnostics
    lines = [
        f"game: {spec.name}",
        f"method: {report.method}",
        f"D1 = {diag['d1']}, D2 = {diag['d2']} ({diag['pairs']} strategy pairs)",
        "",
    ]

    rows = []
    for sol, value in zip(report.per_state, report.value):
        s = sol.matrix.initial_state
        f = report.maximiser.at(s)
        g = report.minimiser.at(s)
        rows.append(
            {
                "value": fmt(value),
                "f*": f.label,
                "g*": g.label,
                "saddles": len(sol.saddle.all_saddles),
                "2x2": "pass" if sol.saddle.certificate_2x2 else "FAIL",
            }
        )
    table = pd.DataFrame(rows, index=[f"state {sol.matrix.initial_state}" for sol in report.per_state])
    lines.append(table.to_string())
    lines.append("")

    lines.append("optimal pure semi-stationary strategies:")
    for sol in report.per_state:
        s = sol.matrix.initial_state
        f = report.maximiser.at(s)
        g = report.minimiser.at(s)
        lines.append(f"  from state {s}: {f.label} [{_choice_text(spec, f)}]  {g.label} [{_choice_text(spec, g)}]")

    for d in diag.get("reference_deltas", []):
        if d["flagged"]:
            lines.append(
                f"! value({d['state']}) = {fmt(d['computed'])} differs from reference "
                f"{fmt(d['reference'])} (delta {fmt(d['delta'])})"
            )
    for note in diag.get("notes", []):
        lines.append(f"note: {note}")

    if emit_matrices:
        f_labels = [f.label for f in report.strategies_max]
        g_labels = [g.label for g in report.strategies_min]
        for sol in report.per_state:
            lines.append("")
            lines.append(f"A^{sol.matrix.initial_state}:")
            lines.append(_matrix_text(sol.matrix.entries, f_labels, g_labels))
        lines.append("")
        lines.append("player I strategies:")
        lines += [f"  {f.label}: {_choice_text(spec, f)}" for f in report.strategies_max]
        lines.append("player II strategies:")
        lines += [f"  {g.label}: {_choice_text(spec, g)}" for g in report.strategies_min]

    return _with_banner(lines, banner)


# -------------------------
# simulate
# -------------------------
def estimate_json(
    spec: GameSpec,
    f: PureStationaryStrategy,
    g: PureStationaryStrategy,
    s0: int,
    estimate: PayoffEstimate,
    analytic: Optional[float],
) -> dict:
    return {
        "game": spec.name,
        "maximiser": f.ordinal,
        "minimiser": g.ordinal,
        "start": s0,
        "mode": estimate.mode,
        "point": estimate.point,
        "stderr": estimate.stderr,
        "reps": estimate.reps,
        "horizon": estimate.horizon,
        "seed": estimate.seed,
        "analytic": analytic,
        "notes": list(estimate.notes),
    }


def estimate_text(
    spec: GameSpec,
    f: PureStationaryStrategy,
    g: PureStationaryStrategy,
    s0: int,
    estimate: PayoffEstimate,
    analytic: Optional[float],
    banner: bool = True,
) -> str:
    lines = [
        f"game: {spec.name}",
        f"pair: {f.label} [{_choice_text(spec, f)}], {g.label} [{_choice_text(spec, g)}]",
        f"start state: {s0}",
        f"mode: {estimate.mode}, reps = {estimate.reps}, horizon = {estimate.horizon}, seed = {estimate.seed}",
        f"estimate: {fmt(estimate.point)} +- {fmt(estimate.stderr)}",
    ]
    if analytic is not None:
        lines.append(f"analytic phi: {fmt(analytic)}")
    lines += [f"note: {n}" for n in estimate.notes]
    return _with_banner(lines, banner)
