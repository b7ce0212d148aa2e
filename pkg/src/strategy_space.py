"""Pure stationary strategies and the Markov chain a pure pair induces.

Strategies of one player are ordered lexicographically over the states that
player controls, the lowest-indexed state being the most significant digit:
with two states of two actions each the order is (1,1), (1,2), (2,1), (2,2),
i.e. f1..f4 in the usual labelling.  Ordinals are 0-based.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping

import numpy as np

from src.errors import EnumerationCapError
from src.game_model import GameSpec, Player, expected_sojourn

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class PureStationaryStrategy:
    player: Player
    # state id -> 0-based action index, only for states the player controls
    choice: Mapping[int, int]
    ordinal: int

    @property
    def label(self) -> str:
        return f"{'f' if self.player is Player.I else 'g'}{self.ordinal + 1}"

    def describe(self, spec: GameSpec) -> Dict[int, str]:
        return {s: spec.state(s).actions[a].label for s, a in sorted(self.choice.items())}

    def __hash__(self):
        return hash((self.player, self.ordinal, tuple(sorted(self.choice.items()))))


@dataclass(frozen=True)
class SemiStationaryStrategy:
    player: Player
    per_initial_state: Mapping[int, PureStationaryStrategy]

    def at(self, initial_state: int) -> PureStationaryStrategy:
        return self.per_initial_state[initial_state]


@dataclass
class InducedChain:
    q: np.ndarray
    r: np.ndarray
    tau: np.ndarray


def _radices(spec: GameSpec, player: Player):
    states = spec.controlled_by(player)
    return states, [len(spec.state(s).actions) for s in states]


def strategy_count(spec: GameSpec, player) -> int:
    return math.prod(_radices(spec, Player(player))[1])


def encode(spec: GameSpec, player, choice: Mapping[int, int]) -> int:
    states, radices = _radices(spec, Player(player))
    if set(choice) != set(states):
        raise ValueError(f"choice must cover exactly states {states}, got {sorted(choice)}")
    ordinal = 0
    for s, radix in zip(states, radices):
        if not 0 <= choice[s] < radix:
            raise ValueError(f"action index {choice[s]} invalid at state {s} ({radix} actions)")
        ordinal = ordinal * radix + choice[s]
    return ordinal


def decode(spec: GameSpec, player, ordinal: int) -> PureStationaryStrategy:
    player = Player(player)
    states, radices = _radices(spec, player)
    total = math.prod(radices)
    if not 0 <= ordinal < total:
        raise ValueError(f"ordinal {ordinal} out of range for player {player.value} ({total} strategies)")
    digits = []
    rest = ordinal
    for radix in reversed(radices):
        rest, digit = divmod(rest, radix)
        digits.append(digit)
    return PureStationaryStrategy(player=player, choice=dict(zip(states, reversed(digits))), ordinal=ordinal)


def enumerate_pure(spec: GameSpec, player, cap: int = ENUMERATION_CAP) -> List[PureStationaryStrategy]:
    player = Player(player)
    states, radices = _radices(spec, player)
    total = math.prod(radices)
    if total > cap:
        raise EnumerationCapError(player.value, total, cap)

    return [
        PureStationaryStrategy(player=player, choice=dict(zip(states, digits)), ordinal=i)
        for i, digits in enumerate(itertools.product(*(range(r) for r in radices)))
    ]


def strategy_from_labels(spec: GameSpec, player, labels: Mapping[int, str]) -> PureStationaryStrategy:
    """Build a strategy from explicit per-state action labels, e.g. {1: "a2", 2: "a1"}."""
    player = Player(player)
    choice = {}
    for s in spec.controlled_by(player):
        if s not in labels:
            raise ValueError(f"no action given for state {s}")
        names = [a.label for a in spec.state(s).actions]
        if labels[s] not in names:
            raise ValueError(f"state {s} has no action {labels[s]!r}; choose from {names}")
        choice[s] = names.index(labels[s])
    extra = set(labels) - set(choice)
    if extra:
        raise ValueError(f"states {sorted(extra)} are not controlled by player {player.value}")
    return decode(spec, player, encode(spec, player, choice))


def induce(spec: GameSpec, f: PureStationaryStrategy, g: PureStationaryStrategy) -> InducedChain:
    if f.player is not Player.I or g.player is not Player.II:
        raise ValueError("induce expects (player I strategy, player II strategy)")
    n = spec.n
    q = np.zeros((n, n))
    r = np.zeros(n)
    tau = np.zeros(n)
    for state in spec.states:
        choice = f.choice if state.controller is Player.I else g.choice
        action = state.actions[choice[state.id]]
        q[state.id - 1] = action.row(n)
        r[state.id - 1] = action.reward
        tau[state.id - 1] = expected_sojourn(action)
    return InducedChain(q=q, r=r, tau=tau)
