from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from src.game_model import (
    ActionSpec,
    GameSpec,
    Player,
    SojournModel,
    StateSpec,
    Transition,
    load_game,
)
from src.strategy_space import decode

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
EXAMPLE_PATH = DATA_DIR / "example_s5.json"


@pytest.fixture(scope="session")
def example_spec():
    return load_game(EXAMPLE_PATH)


@pytest.fixture
def example_path():
    return EXAMPLE_PATH


def strategies(spec, f_label: str, g_label: str):
    """Pair from 1-based labels such as ("f3", "g1")."""
    return (
        decode(spec, Player.I, int(f_label[1:]) - 1),
        decode(spec, Player.II, int(g_label[1:]) - 1),
    )


def mean_sojourn(value: float) -> SojournModel:
    return SojournModel(kind="mean", params=(float(value),))


def make_action(reward, row, sojourn=1.0, label="a"):
    """Action with a dense probability row (1-based destinations from position)."""
    transitions = tuple(Transition(to=i + 1, prob=float(p)) for i, p in enumerate(row) if p > 0)
    model = sojourn if isinstance(sojourn, SojournModel) else mean_sojourn(sojourn)
    return ActionSpec(label=label, reward=float(reward), transitions=transitions, default_sojourn=model)


def make_game(states, name="test"):
    """states: list of (player, [ActionSpec, ...])."""
    return GameSpec(
        name=name,
        states=tuple(
            StateSpec(id=i + 1, controller=Player(player), actions=tuple(actions))
            for i, (player, actions) in enumerate(states)
        ),
    )


def self_loop_game(reward=2.0, sojourn=None):
    sojourn = sojourn or SojournModel(kind="deterministic", params=(0.5,))
    return make_game([("I", [make_action(reward, [1.0], sojourn, label="stay")])], name="self-loop")


# -------------------------
# Seeded corpora
# -------------------------
def random_row(rng, n, force=None, density=None):
    density = rng.uniform(0.2, 1.0) if density is None else density
    mask = rng.random(n) < density
    if force is not None:
        mask[force] = True
    if not mask.any():
        mask[rng.integers(n)] = True
    weights = rng.integers(1, 10, size=n) * mask
    return weights / weights.sum()


def random_stochastic_matrix(rng, n):
    """Sparse-ish random stochastic matrix with a positive diagonal (aperiodic, often reducible)."""
    density = rng.uniform(0.15, 1.0)
    return np.array([random_row(rng, n, force=i, density=density) for i in range(n)])


def random_pismg(rng, max_states=6, max_actions=3):
    n = int(rng.integers(1, max_states + 1))
    states = []
    for s in range(n):
        player = "I" if rng.random() < 0.5 else "II"
        actions = []
        for a in range(int(rng.integers(1, max_actions + 1))):
            actions.append(
                make_action(
                    reward=round(rng.uniform(-5, 5), 3),
                    row=random_row(rng, n),
                    sojourn=round(rng.uniform(0.5, 3.0), 3),
                    label=f"{'a' if player == 'I' else 'b'}{a + 1}",
                )
            )
        states.append((player, actions))
    return make_game(states, name=f"random-{n}")


def scale_rewards(spec: GameSpec, c: float) -> GameSpec:
    return replace(
        spec,
        states=tuple(
            replace(state, actions=tuple(replace(a, reward=a.reward * c) for a in state.actions))
            for state in spec.states
        ),
    )


def _scaled_model(model, c):
    if model is None:
        return None
    if model.kind == "exponential":
        return SojournModel(kind="exponential", params=(model.params[0] / c,))
    return SojournModel(kind=model.kind, params=tuple(p * c for p in model.params))


def scale_sojourns(spec: GameSpec, c: float) -> GameSpec:
    def scale_action(a):
        return replace(
            a,
            default_sojourn=_scaled_model(a.default_sojourn, c),
            transitions=tuple(replace(tr, sojourn=_scaled_model(tr.sojourn, c)) for tr in a.transitions),
        )

    return replace(
        spec,
        states=tuple(replace(state, actions=tuple(scale_action(a) for a in state.actions)) for state in spec.states),
    )
