import json
import logging
import os
from pathlib import Path

import numpy as np
import pandas as pd
from dotenv import load_dotenv

load_dotenv()
logger = logging.getLogger(__name__)

ROOT_DIR = Path(__file__).resolve().parent.parent
CONFIG_PATH = ROOT_DIR / "config" / "solver_settings.json"


def config_path() -> Path:
    return Path(os.environ.get("PISMG_CONFIG", CONFIG_PATH))


def load_method_settings(section: str) -> dict:
    """One block of the settings file: a Cesàro method, ``solver`` or ``simulator``."""
    section = section.lower().strip()

    with open(config_path(), "r", encoding="utf-8") as f:
        cfg = json.load(f)

    if section not in cfg:
        raise ValueError(f"No settings block for '{section}'")

    block = dict(cfg[section])

    # PISMG_MAX_WORKERS overrides the solver pool size
    if section == "solver" and os.environ.get("PISMG_MAX_WORKERS"):
        block["max_workers"] = int(os.environ["PISMG_MAX_WORKERS"])

    return block


def load_matrix(path) -> np.ndarray:
    """Read a square matrix from a JSON array of rows or a headerless CSV file."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        df = pd.read_csv(path, header=None, skipinitialspace=True)
        return df.to_numpy(dtype=float)

    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if isinstance(data, dict) and "q_star" in data:
        data = data["q_star"]
    return np.array(data, dtype=float)


def matrix_to_csv(matrix) -> str:
    rows = [",".join(repr(float(x)) for x in row) for row in np.asarray(matrix)]
    return "\n".join(rows) + "\n"


def fmt(x: float) -> str:
    """Six significant digits for text reports."""
    return f"{x:.6g}"


def save_report(text: str, path) -> Path:
    save_path = Path(path)
    if save_path.parent:
        os.makedirs(save_path.parent, exist_ok=True)

    with open(save_path, "w", encoding="utf-8") as f:
        f.write(text)

    logger.info("[Saved] %s", save_path)
    return save_path
