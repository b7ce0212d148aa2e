"""Monte-Carlo evaluation of a fixed pure strategy pair.

Replication k draws from a Philox stream keyed by ``seed ^ k``.  All uniforms
of a replication are drawn up front (next-state draws, then sojourn draws),
and replications advance in lockstep, so estimates do not depend on how the
replications are chunked or how many workers run them.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.game_model import GameSpec, Player
from src.strategy_space import PureStationaryStrategy

logger = logging.getLogger(__name__)

_CONSTANT, _EXPONENTIAL, _UNIFORM = 0, 1, 2
_KIND_CODES = {"mean": _CONSTANT, "deterministic": _CONSTANT, "exponential": _EXPONENTIAL, "uniform": _UNIFORM}

LIMINF_NOTE = "fixed-horizon estimate; the liminf of the criterion is not certified"


@dataclass
class TrajectoryStats:
    cum_reward: float
    cum_time: float
    steps: int
    final_state: int
    visits: np.ndarray = field(repr=False)


@dataclass
class PayoffEstimate:
    point: float
    stderr: float
    reps: int
    horizon: int
    seed: int
    mode: str = "replications"
    notes: List[str] = field(default_factory=lambda: [LIMINF_NOTE])


def stream(seed: int, k: int) -> np.random.Generator:
    """Substream of replication k."""
    return np.random.Generator(np.random.Philox(key=seed ^ k))


def ratio_stderr(rewards: np.ndarray, times: np.ndarray) -> float:
    """Delta-method standard error of mean(rewards) / mean(times)."""
    n = len(rewards)
    ratio = rewards.mean() / times.mean()
    cov = np.cov(np.vstack([rewards, times]), ddof=1)
    var = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio**2 * cov[1, 1]) / (n * times.mean() ** 2)
    return float(np.sqrt(max(var, 0.0)))


class TrajectorySimulator:

    def __init__(self, spec: GameSpec, f: PureStationaryStrategy, g: PureStationaryStrategy, max_workers: int = 1):
        self.spec = spec
        self.f = f
        self.g = g
        self.max_workers = max_workers

        n = spec.n
        self.reward = np.zeros(n)
        self.cum = np.zeros((n, n))
        self.kind = np.zeros((n, n), dtype=np.int8)
        self.p1 = np.zeros((n, n))
        self.p2 = np.zeros((n, n))
        for state in spec.states:
            choice = f.choice if state.controller is Player.I else g.choice
            action = state.actions[choice[state.id]]
            s = state.id - 1
            self.reward[s] = action.reward

            row = action.row(n)
            cum = np.cumsum(row)
            # never step past the last destination with positive probability
            cum[np.flatnonzero(row > 0).max():] = np.inf
            self.cum[s] = cum

            for tr in action.transitions:
                model = action.sojourn_to(tr)
                self.kind[s, tr.to - 1] = _KIND_CODES[model.kind]
                self.p1[s, tr.to - 1] = model.params[0]
                self.p2[s, tr.to - 1] = model.params[-1]

    def _draws(self, seed: int, k: int, horizon: int):
        u = stream(seed, k).random((2, horizon))
        return u[0], u[1]

    def _advance(self, states: np.ndarray, u_next: np.ndarray, u_time: np.ndarray):
        """Run every trajectory in ``states`` through u_next.shape[1] epochs."""
        reps, horizon = u_next.shape
        rows = np.arange(reps)
        cum_reward = np.zeros(reps)
        cum_time = np.zeros(reps)
        visits = np.zeros((reps, self.spec.n), dtype=np.int64)
        current = states.copy()

        for t in range(horizon):
            visits[rows, current] += 1
            cum_reward += self.reward[current]
            nxt = (u_next[:, t, None] >= self.cum[current]).sum(axis=1)

            kind = self.kind[current, nxt]
            p1 = self.p1[current, nxt]
            p2 = self.p2[current, nxt]
            u = u_time[:, t]
            sojourn = np.where(
                kind == _EXPONENTIAL,
                -np.log1p(-u) / p1,
                np.where(kind == _UNIFORM, p1 + (p2 - p1) * u, p1),
            )
            cum_time += sojourn
            current = nxt

        return cum_reward, cum_time, current, visits

    def _replications(self, s0: int, horizon: int, seed: int, ks: range):
        draws = [self._draws(seed, k, horizon) for k in ks]
        u_next = np.array([d[0] for d in draws])
        u_time = np.array([d[1] for d in draws])
        start = np.full(len(ks), s0 - 1)
        return self._advance(start, u_next, u_time)

    # -------------------------
    # Public operations
    # -------------------------
    def simulate(self, s0: int, horizon: int, seed: int, k: int = 0) -> TrajectoryStats:
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not 1 <= s0 <= self.spec.n:
            raise ValueError(f"start state {s0} is not in 1..{self.spec.n}")
        cum_reward, cum_time, final, visits = self._replications(s0, horizon, seed, range(k, k + 1))
        return TrajectoryStats(
            cum_reward=float(cum_reward[0]),
            cum_time=float(cum_time[0]),
            steps=horizon,
            final_state=int(final[0]) + 1,
            visits=visits[0],
        )

    def estimate_payoff(self, s0: int, horizon: int, reps: int, seed: int, chunk: int = 50) -> PayoffEstimate:
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        if reps < 2:
            raise ValueError("estimate_payoff needs at least 2 replications")
        if not 1 <= s0 <= self.spec.n:
            raise ValueError(f"start state {s0} is not in 1..{self.spec.n}")

        chunks = [range(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                results = list(executor.map(lambda ks: self._replications(s0, horizon, seed, ks), chunks))
        else:
            results = [self._replications(s0, horizon, seed, ks) for ks in chunks]

        rewards = np.concatenate([r[0] for r in results])
        times = np.concatenate([r[1] for r in results])
        point = float(rewards.mean() / times.mean())
        stderr = ratio_stderr(rewards, times)
        logger.info("estimate %.6g +- %.3g from %d replications of %d epochs", point, stderr, reps, horizon)
        return PayoffEstimate(point=point, stderr=stderr, reps=reps, horizon=horizon, seed=seed)

    def estimate_sample_path(self, s0: int, horizon: int, seed: int, batches: int = 10) -> PayoffEstimate:
        """Single-trajectory mode: one long run, standard error by batch means.

        Agrees with estimate_payoff when s0 is recurrent; from a transient
        start it estimates the ratio of the class actually entered.
        """
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not 1 <= s0 <= self.spec.n:
            raise ValueError(f"start state {s0} is not in 1..{self.spec.n}")
        if horizon < batches or batches < 2:
            raise ValueError("sample-path mode needs horizon >= batches >= 2")
        u_next, u_time = self._draws(seed, 0, horizon)
        bounds = np.linspace(0, horizon, batches + 1).astype(int)

        state = np.array([s0 - 1])
        rewards, times = [], []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            r, t, state, _ = self._advance(state, u_next[None, lo:hi], u_time[None, lo:hi])
            rewards.append(r[0])
            times.append(t[0])
        rewards = np.array(rewards)
        times = np.array(times)
        return PayoffEstimate(
            point=float(rewards.sum() / times.sum()),
            stderr=ratio_stderr(rewards, times),
            reps=1,
            horizon=horizon,
            seed=seed,
            mode="sample-path",
            notes=[LIMINF_NOTE, "sample-path estimate from a single trajectory (batch means)"],
        )


def simulate(spec, f, g, s0: int, horizon: int, seed: int) -> TrajectoryStats:
    return TrajectorySimulator(spec, f, g).simulate(s0, horizon, seed)


def estimate_payoff(spec, f, g, s0: int, horizon: int, reps: int, seed: int, max_workers: int = 1) -> PayoffEstimate:
    return TrajectorySimulator(spec, f, g, max_workers=max_workers).estimate_payoff(s0, horizon, reps, seed)
