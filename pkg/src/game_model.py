import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.errors import GameFormatError, GameValidationError

logger = logging.getLogger(__name__)

STOCH_TOL = 1e-9
# rows closer to 1 than this are left untouched, so renormalisation is idempotent
_RENORMALIZE_FLOOR = 1e-15

SOJOURN_PARAMS = {
    "mean": ("value",),
    "deterministic": ("t",),
    "exponential": ("rate",),
    "uniform": ("a", "b"),
}


class Player(str, Enum):
    I = "I"
    II = "II"

    @property
    def other(self) -> "Player":
        return Player.II if self is Player.I else Player.I


@dataclass(frozen=True)
class SojournModel:
    kind: str
    params: Tuple[float, ...]

    @property
    def mean(self) -> float:
        if self.kind == "exponential":
            return 1.0 / self.params[0]
        if self.kind == "uniform":
            a, b = self.params
            return (a + b) / 2.0
        return self.params[0]

    def problem(self) -> Optional[str]:
        """Return a message if the parameters do not give a positive finite mean."""
        if not all(math.isfinite(p) for p in self.params):
            return "non-finite sojourn parameter"
        if self.kind == "uniform":
            a, b = self.params
            if a < 0 or b <= a:
                return f"nonpositive sojourn (uniform needs 0 <= a < b, got a={a}, b={b})"
            return None
        if self.params[0] <= 0:
            return f"nonpositive sojourn ({self.kind} parameter {self.params[0]})"
        return None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for name, value in zip(SOJOURN_PARAMS[self.kind], self.params):
            out[name] = value
        return out


@dataclass(frozen=True)
class Transition:
    to: int
    prob: float
    sojourn: Optional[SojournModel] = None


@dataclass(frozen=True)
class ActionSpec:
    label: str
    reward: float
    transitions: Tuple[Transition, ...]
    default_sojourn: Optional[SojournModel] = None

    def sojourn_to(self, transition: Transition) -> SojournModel:
        return transition.sojourn if transition.sojourn is not None else self.default_sojourn

    def row(self, n_states: int) -> np.ndarray:
        row = np.zeros(n_states)
        for tr in self.transitions:
            row[tr.to - 1] = tr.prob
        return row


@dataclass(frozen=True)
class StateSpec:
    id: int
    controller: Player
    actions: Tuple[ActionSpec, ...]


@dataclass(frozen=True)
class Reference:
    value: Tuple[float, ...]
    tolerance: float = 5e-4
    source: str = ""


@dataclass(frozen=True)
class GameSpec:
    name: str
    states: Tuple[StateSpec, ...]
    reference: Optional[Reference] = None

    @property
    def n(self) -> int:
        return len(self.states)

    def state(self, state_id: int) -> StateSpec:
        return self.states[state_id - 1]

    def controlled_by(self, player: Player) -> List[int]:
        return [s.id for s in self.states if s.controller is Player(player)]


@dataclass(frozen=True)
class ValidationReport:
    s1: Tuple[int, ...]
    s2: Tuple[int, ...]
    d: Dict[int, int]
    t: Dict[int, int]
    d1: int
    d2: int
    warnings: Tuple[str, ...] = field(default_factory=tuple)


def expected_sojourn(action: ActionSpec) -> float:
    if action.default_sojourn is not None and all(tr.sojourn is None for tr in action.transitions):
        return action.default_sojourn.mean
    return math.fsum(tr.prob * action.sojourn_to(tr).mean for tr in action.transitions)


def validate(spec: GameSpec) -> ValidationReport:
    """Check every GameSpec invariant; raise GameValidationError on the first violation."""
    n = spec.n
    if n < 1:
        raise GameValidationError("game has no states")
    ids = sorted(s.id for s in spec.states)
    if ids != list(range(1, n + 1)):
        raise GameValidationError(f"state ids must be exactly 1..{n}, got {ids}")
    if spec.reference is not None and len(spec.reference.value) != n:
        raise GameValidationError(f"reference value has {len(spec.reference.value)} entries for {n} states")

    warnings = []
    for state in spec.states:
        if not isinstance(state.controller, Player):
            raise GameValidationError(f"controller must be I or II, got {state.controller!r}", state=state.id)
        if not state.actions:
            raise GameValidationError("state has no actions", state=state.id)

        labels = [a.label for a in state.actions]
        if len(set(labels)) != len(labels):
            warnings.append(f"state {state.id}: duplicate action labels {labels}")

        for a_idx, action in enumerate(state.actions, start=1):
            _check_action(action, state.id, a_idx, n, warnings)

    s1 = tuple(spec.controlled_by(Player.I))
    s2 = tuple(spec.controlled_by(Player.II))
    d = {s: len(spec.state(s).actions) for s in s1}
    t = {s: len(spec.state(s).actions) for s in s2}

    for w in warnings:
        logger.warning(w)

    return ValidationReport(
        s1=s1,
        s2=s2,
        d=d,
        t=t,
        d1=math.prod(d.values()),
        d2=math.prod(t.values()),
        warnings=tuple(warnings),
    )


def _check_action(action: ActionSpec, state_id: int, a_idx: int, n: int, warnings: list):
    if not action.transitions:
        raise GameValidationError("action has no transitions", state=state_id, action=a_idx)
    if not math.isfinite(action.reward):
        raise GameValidationError("reward is not finite", state=state_id, action=a_idx)

    seen = set()
    for tr in action.transitions:
        if not 1 <= tr.to <= n:
            raise GameValidationError(f"transition to unknown state {tr.to}", state=state_id, action=a_idx)
        if tr.to in seen:
            raise GameValidationError(f"destination {tr.to} listed twice", state=state_id, action=a_idx)
        seen.add(tr.to)
        if not (0.0 <= tr.prob <= 1.0):
            raise GameValidationError(f"probability {tr.prob} outside [0, 1]", state=state_id, action=a_idx)

    total = math.fsum(tr.prob for tr in action.transitions)
    if abs(total - 1.0) > STOCH_TOL:
        raise GameValidationError(
            f"transition probabilities sum to {total:.12g}, not 1", state=state_id, action=a_idx
        )
    if abs(total - 1.0) > _RENORMALIZE_FLOOR:
        warnings.append(f"state {state_id}, action {a_idx}: row sum {total!r} renormalized")

    for tr in action.transitions:
        model = action.sojourn_to(tr)
        if model is None:
            raise GameValidationError(
                f"no sojourn model for transition to {tr.to} and no action default",
                state=state_id,
                action=a_idx,
            )
        problem = model.problem()
        if problem:
            raise GameValidationError(problem, state=state_id, action=a_idx)

    if not expected_sojourn(action) > 0:
        raise GameValidationError("nonpositive sojourn (expected sojourn time is 0)", state=state_id, action=a_idx)


def _renormalized(spec: GameSpec) -> GameSpec:
    states = []
    for state in spec.states:
        actions = []
        for action in state.actions:
            total = math.fsum(tr.prob for tr in action.transitions)
            if abs(total - 1.0) > _RENORMALIZE_FLOOR:
                action = replace(
                    action,
                    transitions=tuple(replace(tr, prob=tr.prob / total) for tr in action.transitions),
                )
            actions.append(action)
        states.append(replace(state, actions=tuple(actions)))
    return replace(spec, states=tuple(states))


# -------------------------
# File format
# -------------------------
def parse_game(text: str) -> GameSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameFormatError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e

    if not isinstance(data, dict):
        raise GameFormatError("top level must be an object")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise GameFormatError("'name' must be a string")
    raw_states = _require(data, "states", list, "top level")

    states = [_parse_state(raw, i) for i, raw in enumerate(raw_states)]
    states.sort(key=lambda s: s.id)

    reference = None
    if "reference" in data:
        reference = _parse_reference(data["reference"])

    spec = GameSpec(name=name, states=tuple(states), reference=reference)
    validate(spec)
    return _renormalized(spec)


def load_game(path) -> GameSpec:
    text = Path(path).read_text(encoding="utf-8")
    spec = parse_game(text)
    logger.info("loaded game %r from %s (%d states)", spec.name, path, spec.n)
    return spec


def serialize_game(spec: GameSpec) -> str:
    states = []
    for state in spec.states:
        actions = []
        for action in state.actions:
            entry = {"label": action.label, "reward": action.reward}
            if action.default_sojourn is not None:
                entry["sojourn"] = action.default_sojourn.to_dict()
            transitions = []
            for tr in action.transitions:
                t = {"to": tr.to, "prob": tr.prob}
                if tr.sojourn is not None:
                    t["sojourn"] = tr.sojourn.to_dict()
                transitions.append(t)
            entry["transitions"] = transitions
            actions.append(entry)
        states.append({"id": state.id, "player": state.controller.value, "actions": actions})

    out = {"name": spec.name}
    if spec.reference is not None:
        out["reference"] = {
            "source": spec.reference.source,
            "tolerance": spec.reference.tolerance,
            "value": list(spec.reference.value),
        }
    out["states"] = states
    return json.dumps(out, indent=2, ensure_ascii=False) + "\n"


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise GameFormatError(f"{where}: missing field '{key}'")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise GameFormatError(f"{where}: '{key}' must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise GameFormatError(f"{where}: '{key}' must be an integer")
        return value
    if not isinstance(value, kind):
        raise GameFormatError(f"{where}: '{key}' must be of type {kind.__name__}")
    return value


def _parse_player(value, where: str) -> Player:
    if isinstance(value, list):
        if set(value) >= {"I", "II"}:
            raise GameFormatError(
                f"{where}: state is controlled by both players; only perfect-information games are supported"
            )
        if len(value) != 1:
            raise GameFormatError(f"{where}: 'player' must be \"I\" or \"II\"")
        value = value[0]
    try:
        return Player(value)
    except ValueError:
        raise GameFormatError(f"{where}: 'player' must be \"I\" or \"II\", got {value!r}") from None


def _parse_state(raw, index: int) -> StateSpec:
    where = f"states[{index}]"
    if not isinstance(raw, dict):
        raise GameFormatError(f"{where}: must be an object")
    state_id = _require(raw, "id", int, where)
    where = f"state {state_id}"
    controller = _parse_player(_require(raw, "player", (str, list), where), where)

    actions = []
    for a_idx, raw_action in enumerate(_require(raw, "actions", list, where), start=1):
        a_where = f"{where}, action {a_idx}"
        if not isinstance(raw_action, dict):
            raise GameFormatError(f"{a_where}: must be an object")
        if "player" in raw_action and _parse_player(raw_action["player"], a_where) is not controller:
            raise GameFormatError(
                f"{a_where}: lists an action for player {raw_action['player']} in a state controlled by "
                f"player {controller.value}; only perfect-information games are supported"
            )
        actions.append(_parse_action(raw_action, a_where))
    return StateSpec(id=state_id, controller=controller, actions=tuple(actions))


def _parse_action(raw: dict, where: str) -> ActionSpec:
    label = raw.get("label", "")
    if not isinstance(label, str):
        raise GameFormatError(f"{where}: 'label' must be a string")
    reward = _require(raw, "reward", float, where)
    default = _parse_sojourn(raw["sojourn"], where) if raw.get("sojourn") is not None else None

    transitions = []
    for raw_tr in _require(raw, "transitions", list, where):
        if not isinstance(raw_tr, dict):
            raise GameFormatError(f"{where}: transitions must be objects")
        sojourn = _parse_sojourn(raw_tr["sojourn"], where) if raw_tr.get("sojourn") is not None else None
        transitions.append(
            Transition(
                to=_require(raw_tr, "to", int, where),
                prob=_require(raw_tr, "prob", float, where),
                sojourn=sojourn,
            )
        )
    return ActionSpec(label=label, reward=reward, transitions=tuple(transitions), default_sojourn=default)


def _parse_sojourn(raw, where: str) -> SojournModel:
    if not isinstance(raw, dict):
        raise GameFormatError(f"{where}: sojourn must be an object")
    kind = raw.get("kind")
    if kind not in SOJOURN_PARAMS:
        raise GameFormatError(f"{where}: unknown sojourn kind {kind!r}; expected one of {sorted(SOJOURN_PARAMS)}")
    params = tuple(_require(raw, p, float, f"{where}, {kind} sojourn") for p in SOJOURN_PARAMS[kind])
    return SojournModel(kind=kind, params=params)


def _parse_reference(raw) -> Reference:
    if not isinstance(raw, dict):
        raise GameFormatError("'reference' must be an object")
    value = _require(raw, "value", list, "reference")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise GameFormatError("reference: 'value' must be a list of numbers")
    tolerance = _require(raw, "tolerance", float, "reference") if "tolerance" in raw else 5e-4
    return Reference(value=tuple(float(v) for v in value), tolerance=tolerance, source=str(raw.get("source", "")))
