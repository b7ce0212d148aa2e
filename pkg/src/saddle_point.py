"""Pure saddle points of payoff matrices (row player maximises)."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.errors import SaddleConsistencyError

SADDLE_TOL = 1e-9


@dataclass
class PayoffMatrix:
    initial_state: int
    entries: np.ndarray
    row_labels: List[int] = field(default_factory=list)
    col_labels: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2:
            raise ValueError("payoff matrix must be two-dimensional")
        if not np.isfinite(self.entries).all():
            raise ValueError(f"payoff matrix for state {self.initial_state} has non-finite entries")
        if not self.row_labels:
            self.row_labels = list(range(self.rows))
        if not self.col_labels:
            self.col_labels = list(range(self.cols))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


@dataclass
class SaddleResult:
    exists: bool
    row: Optional[int] = None
    col: Optional[int] = None
    value: Optional[float] = None
    all_saddles: List[Tuple[int, int]] = field(default_factory=list)
    certificate_2x2: Optional[bool] = None
    maximin: float = float("nan")
    minimax: float = float("nan")


def saddle_tolerance(entries, rel_tol: float = SADDLE_TOL) -> float:
    """Scale-aware epsilon: rel_tol * max(1, largest absolute entry)."""
    entries = np.asarray(entries, dtype=float)
    return rel_tol * max(1.0, float(np.abs(entries).max()))


def _entries(a) -> np.ndarray:
    return a.entries if isinstance(a, PayoffMatrix) else np.asarray(a, dtype=float)


def check_interchangeable(values, eps: float, initial_state: Optional[int] = None) -> None:
    """Saddle values must agree within 2 * eps.

    Two tolerant comparisons chain between any pair of saddle cells, so a wider
    spread means the entries or ``eps`` are not what the search assumed.
    """
    values = np.asarray(values, dtype=float)
    spread = float(values.max() - values.min())
    if not spread <= 2 * eps:
        raise SaddleConsistencyError(
            initial_state, f"saddle values spread by {spread:g}, more than 2 * eps = {2 * eps:g}"
        )


def find_pure_saddle(a, eps: Optional[float] = None) -> SaddleResult:
    """Cells that are a row minimum and a column maximum, within ``eps``.

    The lexicographically smallest cell is selected.  ``eps`` defaults to
    saddle_tolerance(A).
    """
    entries = _entries(a)
    if eps is None:
        eps = saddle_tolerance(entries)

    row_min = entries.min(axis=1)
    col_max = entries.max(axis=0)
    maximin = float(row_min.max())
    minimax = float(col_max.min())

    if maximin < minimax - eps:
        return SaddleResult(exists=False, maximin=maximin, minimax=minimax)

    is_saddle = (entries <= row_min[:, None] + eps) & (entries >= col_max[None, :] - eps)
    cells = [(int(i), int(j)) for i, j in np.argwhere(is_saddle)]
    # argwhere is row-major, so cells[0] is the lexicographic minimum
    i, j = cells[0]
    value = float(entries[i, j])

    check_interchangeable(entries[is_saddle], eps, getattr(a, "initial_state", None))

    return SaddleResult(
        exists=True,
        row=i,
        col=j,
        value=value,
        all_saddles=cells,
        maximin=maximin,
        minimax=minimax,
    )


def check_all_2x2(a, eps: Optional[float] = None) -> Optional[Tuple[int, int, int, int]]:
    """Return None if every 2x2 submatrix has a pure saddle, else the first bad (i, i', j, j').

    A 2x2 block [[a, b], [c, d]] lacks a pure saddle exactly when both diagonal
    entries are strictly below both off-diagonal entries, or strictly above.
    """
    entries = _entries(a)
    if eps is None:
        eps = saddle_tolerance(entries)
    n_rows, n_cols = entries.shape
    if n_rows < 2 or n_cols < 2:
        return None

    jj, jj2 = np.triu_indices(n_cols, k=1)
    for i in range(n_rows - 1):
        top_a = entries[i, jj]
        top_b = entries[i, jj2]
        for i2 in range(i + 1, n_rows):
            bot_c = entries[i2, jj]
            bot_d = entries[i2, jj2]
            low = (top_a < top_b - eps) & (top_a < bot_c - eps) & (bot_d < top_b - eps) & (bot_d < bot_c - eps)
            high = (top_a > top_b + eps) & (top_a > bot_c + eps) & (bot_d > top_b + eps) & (bot_d > bot_c + eps)
            bad = np.flatnonzero(low | high)
            if bad.size:
                k = bad[0]
                return (i, i2, int(jj[k]), int(jj2[k]))
    return None
