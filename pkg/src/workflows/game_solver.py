import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np
from tqdm import tqdm

from src.errors import CesaroError, PayoffError, SaddleConsistencyError, TheoremViolationError
from src.game_model import GameSpec, Player, validate
from src.markov_analysis import horizon_sum
from src.methods.base_method import BaseCesaroMethod
from src.methods.method_factory import CesaroMethodFactory
from src.saddle_point import PayoffMatrix, SaddleResult, check_all_2x2, find_pure_saddle, saddle_tolerance
from src.strategy_space import (
    ENUMERATION_CAP,
    PureStationaryStrategy,
    SemiStationaryStrategy,
    enumerate_pure,
    induce,
)

logger = logging.getLogger(__name__)

MethodLike = Union[str, BaseCesaroMethod]


@dataclass
class StateSolution:
    saddle: SaddleResult
    matrix: PayoffMatrix


@dataclass
class SolveReport:
    value: np.ndarray
    maximiser: SemiStationaryStrategy
    minimiser: SemiStationaryStrategy
    per_state: List[StateSolution]
    method: str
    strategies_max: List[PureStationaryStrategy] = field(default_factory=list)
    strategies_min: List[PureStationaryStrategy] = field(default_factory=list)
    diagnostics: Dict = field(default_factory=dict)


def _as_method(method: MethodLike) -> BaseCesaroMethod:
    if isinstance(method, BaseCesaroMethod):
        return method
    return CesaroMethodFactory.create(method)


class GameSolver:

    def __init__(
        self,
        method: MethodLike = "structural",
        saddle_tol: float = 1e-9,
        enumeration_cap: int = ENUMERATION_CAP,
        max_workers: int = 1,
        show_progress: bool = False,
    ):
        self.method = _as_method(method)
        self.saddle_tol = saddle_tol
        self.enumeration_cap = enumeration_cap
        self.max_workers = max_workers
        self.show_progress = show_progress
        # (f, g) payoff vectors do not depend on the initial state; one table per game
        self._tables: Dict[GameSpec, np.ndarray] = {}
        self._notes: Dict[GameSpec, List[str]] = {}

    # -------------------------
    # Payoffs
    # -------------------------
    def payoff_vector(self, spec: GameSpec, f: PureStationaryStrategy, g: PureStationaryStrategy) -> np.ndarray:
        phi, _ = self._evaluate(spec, f, g)
        return phi

    def _evaluate(self, spec, f, g):
        chain = induce(spec, f, g)
        try:
            result = self.method.limit(chain.q)
        except CesaroError as e:
            raise PayoffError(f.ordinal, g.ordinal, e) from e
        # rows of Q* are probability vectors, so the denominator is >= min tau > 0
        return (result.q_star @ chain.r) / (result.q_star @ chain.tau), result.notes

    def payoff_table(self, spec: GameSpec, fs=None, gs=None) -> np.ndarray:
        """phi(s, f_i, g_j) for every pure pair, shape (D1, D2, N)."""
        if spec in self._tables:
            return self._tables[spec]
        fs = fs if fs is not None else enumerate_pure(spec, Player.I, self.enumeration_cap)
        gs = gs if gs is not None else enumerate_pure(spec, Player.II, self.enumeration_cap)
        pairs = list(itertools.product(fs, gs))

        start = time.time()
        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                results = list(
                    tqdm(
                        executor.map(lambda pair: self._evaluate(spec, *pair), pairs),
                        total=len(pairs),
                        desc="strategy pairs",
                        disable=not self.show_progress,
                    )
                )
        else:
            results = [
                self._evaluate(spec, f, g)
                for f, g in tqdm(pairs, desc="strategy pairs", disable=not self.show_progress)
            ]
        logger.info("evaluated %d strategy pairs in %.2f seconds", len(pairs), time.time() - start)

        table = np.array([phi for phi, _ in results]).reshape(len(fs), len(gs), spec.n)
        notes = sorted({note for _, pair_notes in results for note in pair_notes})
        self._tables[spec] = table
        self._notes[spec] = notes
        return table

    def build_payoff_matrix(self, spec: GameSpec, s: int) -> PayoffMatrix:
        table = self.payoff_table(spec)
        return PayoffMatrix(initial_state=s, entries=table[:, :, s - 1])

    # -------------------------
    # Solve
    # -------------------------
    def solve(self, spec: GameSpec) -> SolveReport:
        report = validate(spec)
        fs = enumerate_pure(spec, Player.I, self.enumeration_cap)
        gs = enumerate_pure(spec, Player.II, self.enumeration_cap)
        table = self.payoff_table(spec, fs, gs)

        value = np.zeros(spec.n)
        per_state = []
        best_f, best_g = {}, {}
        failed_2x2 = {}
        for s in range(1, spec.n + 1):
            matrix = PayoffMatrix(initial_state=s, entries=table[:, :, s - 1])
            eps = saddle_tolerance(matrix.entries, self.saddle_tol)
            saddle = find_pure_saddle(matrix, eps)
            violation = check_all_2x2(matrix, eps)
            saddle.certificate_2x2 = violation is None
            if violation is not None:
                logger.warning("A^%d has a 2x2 submatrix without a pure saddle at %s", s, violation)
                failed_2x2[s] = violation
            if not saddle.exists:
                if violation is None:
                    # every 2x2 block has a saddle, so the whole matrix must
                    raise SaddleConsistencyError(s, "2x2 certificate passed but no pure saddle was found")
                raise TheoremViolationError(matrix)
            value[s - 1] = saddle.value
            best_f[s] = fs[saddle.row]
            best_g[s] = gs[saddle.col]
            per_state.append(StateSolution(saddle=saddle, matrix=matrix))

        diagnostics = {
            "d1": report.d1,
            "d2": report.d2,
            "pairs": report.d1 * report.d2,
            "saddle_counts": [len(sol.saddle.all_saddles) for sol in per_state],
            "certificate_2x2": [sol.saddle.certificate_2x2 for sol in per_state],
            "failed_2x2": failed_2x2,
            "minimax_gap": [sol.saddle.minimax - sol.saddle.maximin for sol in per_state],
            "reference_deltas": reference_deltas(spec, value),
            "notes": list(self._notes.get(spec, [])) + list(report.warnings),
        }

        for d in diagnostics["reference_deltas"]:
            if d["flagged"]:
                logger.warning(
                    "value(%d) = %.6g differs from reference %.6g by %.3g",
                    d["state"], d["computed"], d["reference"], d["delta"],
                )

        return SolveReport(
            value=value,
            maximiser=SemiStationaryStrategy(player=Player.I, per_initial_state=best_f),
            minimiser=SemiStationaryStrategy(player=Player.II, per_initial_state=best_g),
            per_state=per_state,
            method=self.method.name,
            strategies_max=fs,
            strategies_min=gs,
            diagnostics=diagnostics,
        )


def reference_deltas(spec: GameSpec, value: np.ndarray) -> List[dict]:
    if spec.reference is None:
        return []
    out = []
    for s, (computed, ref) in enumerate(zip(value, spec.reference.value), start=1):
        delta = float(computed - ref)
        out.append(
            {
                "state": s,
                "computed": float(computed),
                "reference": ref,
                "delta": delta,
                "flagged": abs(delta) > spec.reference.tolerance,
            }
        )
    return out


# -------------------------
# Functional entry points
# -------------------------
def payoff_vector(spec: GameSpec, f, g, method: MethodLike = "structural") -> np.ndarray:
    return GameSolver(method).payoff_vector(spec, f, g)


def build_payoff_matrix(spec: GameSpec, s: int, method: MethodLike = "structural") -> PayoffMatrix:
    return GameSolver(method).build_payoff_matrix(spec, s)


def solve(spec: GameSpec, method: MethodLike = "structural", **options) -> SolveReport:
    return GameSolver(method, **options).solve(spec)


def horizon_payoff(spec: GameSpec, f, g, n: int) -> np.ndarray:
    """Exact n-epoch ratio sum_{m<n}[Q^m r] / sum_{m<n}[Q^m tau]; tends to phi as n grows."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    chain = induce(spec, f, g)
    series = horizon_sum(chain.q, n)
    return (series @ chain.r) / (series @ chain.tau)
