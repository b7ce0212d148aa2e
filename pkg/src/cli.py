import argparse
import json
import logging
import sys
from pathlib import Path

from src import __version__
from src.errors import PismgError
from src.game_model import Player, load_game, validate
from src.methods.method_factory import METHODS, CesaroMethodFactory
from src.report import (
    cesaro_diagnostics,
    enumeration_json,
    enumeration_text,
    estimate_json,
    estimate_text,
    solve_json,
    solve_text,
    to_json,
    validation_json,
    validation_text,
)
from src.strategy_space import decode, enumerate_pure, strategy_from_labels
from src.workflows.game_solver import GameSolver
from src.workflows.trajectory_simulator import TrajectorySimulator
from utils.utils import load_matrix, load_method_settings, matrix_to_csv, save_report

logger = logging.getLogger(__name__)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-banner", action="store_true", help="omit the version banner in text output")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG on stderr")
    common.add_argument("--output", help="also write the report to this file")
    return common


def _method_flags(p: argparse.ArgumentParser):
    p.add_argument("--method", choices=METHODS, default=None, help="Cesàro limit method (default structural)")
    p.add_argument("--deflation-tol", type=float, default=None, help="lazari unit-root deflation tolerance")
    p.add_argument("--averaging-tol", type=float, default=None, help="averaging convergence tolerance")
    p.add_argument("--averaging-n-max", type=int, default=None, help="averaging power cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pismg",
        description="Solve zero-sum perfect-information semi-Markov games under limiting ratio average payoff.",
    )
    parser.add_argument("--version", action="version", version=f"pismg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("validate", parents=[common], help="check a game file and report its partition")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("enumerate", parents=[common], help="count (and list) pure stationary strategies")
    p.add_argument("file")
    p.add_argument("--tables", action="store_true", help="print the strategy tables f1.., g1..")
    p.add_argument("--cap", type=int, default=None, help="enumeration cap per player")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("cesaro", parents=[common], help="Cesàro limiting matrix of a stochastic matrix")
    p.add_argument("--matrix", required=True, help="JSON array of rows or CSV file")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="default: same as the input")
    _method_flags(p)

    p = sub.add_parser("solve", parents=[common], help="value vector and optimal pure semi-stationary strategies")
    p.add_argument("file")
    p.add_argument("--emit-matrices", action="store_true", help="include every payoff matrix A^s")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--saddle-tol", type=float, default=None, help="relative saddle tolerance")
    p.add_argument("--cap", type=int, default=None, help="enumeration cap per player")
    p.add_argument("--max-workers", type=int, default=None, help="threads evaluating strategy pairs")
    p.add_argument("--progress", action="store_true", help="progress bar on stderr")
    _method_flags(p)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo estimate of a pure pair's payoff")
    p.add_argument("file")
    maximiser = p.add_mutually_exclusive_group(required=True)
    maximiser.add_argument("--max", help="player I strategy: 0-based ordinal or label such as f3")
    maximiser.add_argument("--max-labels", help="player I actions per state, e.g. 1=a2,2=a1")
    minimiser = p.add_mutually_exclusive_group(required=True)
    minimiser.add_argument("--min", help="player II strategy: 0-based ordinal or label such as g1")
    minimiser.add_argument("--min-labels", help="player II actions per state, e.g. 3=b1,4=b2")
    p.add_argument("--start", type=int, required=True, help="initial state")
    p.add_argument("--horizon", type=int, default=None, help="decision epochs per trajectory")
    p.add_argument("--reps", type=int, default=None, help="replications")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=("replications", "sample-path"), default="replications")
    p.add_argument("--format", choices=("text", "json"), default="text")

    return parser


# -------------------------
# Subcommands
# -------------------------
def _cmd_validate(args) -> str:
    spec = load_game(args.file)
    report = validate(spec)
    if args.format == "json":
        return to_json(validation_json(spec, report))
    return validation_text(spec, report, banner=not args.no_banner)


def _cmd_enumerate(args) -> str:
    spec = load_game(args.file)
    cap = args.cap if args.cap is not None else load_method_settings("solver")["enumeration_cap"]
    fs = enumerate_pure(spec, Player.I, cap)
    gs = enumerate_pure(spec, Player.II, cap)
    if args.format == "json":
        return to_json(enumeration_json(spec, fs, gs, args.tables))
    return enumeration_text(spec, fs, gs, args.tables, banner=not args.no_banner)


def _build_method(args, default: str):
    method = args.method or default
    return CesaroMethodFactory.from_config(
        method,
        deflation_tol=args.deflation_tol,
        tol=args.averaging_tol,
        n_max=args.averaging_n_max if method == "averaging" else None,
    )


def _cmd_cesaro(args) -> str:
    q = load_matrix(args.matrix)
    method = _build_method(args, load_method_settings("solver")["method"])
    result = method.limit(q)

    print(json.dumps(cesaro_diagnostics(result)), file=sys.stderr)
    out_format = args.format or ("csv" if Path(args.matrix).suffix.lower() == ".csv" else "json")
    if out_format == "csv":
        return matrix_to_csv(result.q_star)
    return json.dumps(result.q_star.tolist()) + "\n"


def _cmd_solve(args) -> str:
    spec = load_game(args.file)
    cfg = load_method_settings("solver")
    max_workers = args.max_workers if args.max_workers is not None else cfg["max_workers"]
    if max_workers < 1:
        raise ValueError("max-workers must be at least 1")
    solver = GameSolver(
        method=_build_method(args, cfg["method"]),
        saddle_tol=args.saddle_tol if args.saddle_tol is not None else cfg["saddle_tol"],
        enumeration_cap=args.cap if args.cap is not None else cfg["enumeration_cap"],
        max_workers=max_workers,
        show_progress=args.progress,
    )
    report = solver.solve(spec)
    if args.format == "json":
        return to_json(solve_json(spec, report, args.emit_matrices))
    return solve_text(spec, report, args.emit_matrices, banner=not args.no_banner)


def _parse_labels(text: str) -> dict:
    labels = {}
    for item in text.split(","):
        state, sep, label = item.partition("=")
        if not sep:
            raise ValueError(f"expected STATE=LABEL, got {item!r}")
        labels[int(state)] = label.strip()
    return labels


def _pick(spec, player: Player, ordinal, labels):
    if labels is not None:
        return strategy_from_labels(spec, player, _parse_labels(labels))
    prefix = "f" if player is Player.I else "g"
    if ordinal.lower().startswith(prefix):
        return decode(spec, player, int(ordinal[1:]) - 1)
    return decode(spec, player, int(ordinal))


def _cmd_simulate(args) -> str:
    spec = load_game(args.file)
    cfg = load_method_settings("simulator")
    horizon = args.horizon if args.horizon is not None else cfg["horizon"]
    reps = args.reps if args.reps is not None else cfg["reps"]
    seed = args.seed if args.seed is not None else cfg["seed"]
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if not 1 <= args.start <= spec.n:
        raise ValueError(f"start state {args.start} is not in 1..{spec.n}")

    f = _pick(spec, Player.I, args.max, args.max_labels)
    g = _pick(spec, Player.II, args.min, args.min_labels)
    simulator = TrajectorySimulator(spec, f, g)
    if args.mode == "sample-path":
        estimate = simulator.estimate_sample_path(args.start, horizon, seed, batches=cfg.get("batches", 10))
    else:
        estimate = simulator.estimate_payoff(args.start, horizon, reps, seed)

    analytic = float(GameSolver("structural").payoff_vector(spec, f, g)[args.start - 1])
    if args.format == "json":
        return to_json(estimate_json(spec, f, g, args.start, estimate, analytic))
    return estimate_text(spec, f, g, args.start, estimate, analytic, banner=not args.no_banner)


COMMANDS = {
    "validate": _cmd_validate,
    "enumerate": _cmd_enumerate,
    "cesaro": _cmd_cesaro,
    "solve": _cmd_solve,
    "simulate": _cmd_simulate,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="[%(levelname)s] %(name)s: %(message)s", stream=sys.stderr, force=True)

    try:
        text = COMMANDS[args.command](args)
    except (PismgError, OSError, ValueError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return 1

    sys.stdout.write(text)
    if args.output:
        save_report(text, args.output)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))
