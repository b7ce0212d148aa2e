"""Stochastic-matrix algebra.

Cesàro limiting matrices Q* = lim (1/n) sum_{m=1..n} Q^m by three methods:

- ``lazari``: characteristic polynomial (Faddeev-LeVerrier), deflation of the
  unit root, W = T(Q) and normalisation by a row sum;
- ``averaging``: doubling partial sums of powers, optionally Richardson
  extrapolated;
- ``structural``: recurrent/transient decomposition, stationary vectors and
  absorption probabilities.

Matrices are plain float ndarrays; state indices are 0-based here.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph

from src.errors import (
    DeflationError,
    DegenerateChainError,
    LazariRefusedError,
    MatrixError,
    NormalizationError,
)

logger = logging.getLogger(__name__)

STOCH_TOL = 1e-9
PROJ_TOL = 1e-8
EDGE_TOL = 1e-12
ROWSUM_TOL = 1e-6
DEFLATION_TOL = 1e-7
N_MAX_LAZARI = 12
AVERAGING_TOL = 1e-10
AVERAGING_N_MAX = 10**6

# pivots below this (relative to the matrix scale) mean a singular solve
_PIVOT_TOL = 1e-13


@dataclass
class ChainDecomposition:
    recurrent_classes: List[Tuple[int, ...]]
    transient: Tuple[int, ...]
    stationary: List[np.ndarray]
    # absorption[k, c]: probability that transient[k] ends in recurrent_classes[c]
    absorption: np.ndarray


@dataclass
class CesaroResult:
    q_star: np.ndarray
    method: str
    m1: Optional[int] = None
    iterations: Optional[int] = None
    converged: bool = True
    decomposition: Optional[ChainDecomposition] = None
    notes: List[str] = field(default_factory=list)


def check_stochastic(q, tol: float = STOCH_TOL) -> np.ndarray:
    q = np.array(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] == 0:
        raise MatrixError(f"expected a non-empty square matrix, got shape {q.shape}")
    if not np.isfinite(q).all():
        raise MatrixError("matrix has non-finite entries")
    if (q < -tol).any():
        i, j = np.argwhere(q < -tol)[0]
        raise MatrixError(f"negative entry {q[i, j]!r} at ({i + 1}, {j + 1})")
    sums = q.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        raise MatrixError(f"row {bad[0] + 1} sums to {sums[bad[0]]:.12g}, not 1")
    return q


def projection_residual(q: np.ndarray, q_star: np.ndarray) -> float:
    """Largest of ||Q*Q - Q*||, ||QQ* - Q*||, ||Q*Q* - Q*|| in the infinity norm."""
    return max(
        np.abs(q_star @ q - q_star).sum(axis=1).max(),
        np.abs(q @ q_star - q_star).sum(axis=1).max(),
        np.abs(q_star @ q_star - q_star).sum(axis=1).max(),
    )


# -------------------------
# Characteristic polynomial
# -------------------------
def char_poly(q, n_max: int = N_MAX_LAZARI) -> np.ndarray:
    """Coefficients of det(Q - zI), ascending degree, by Faddeev-LeVerrier."""
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    if n > n_max:
        raise LazariRefusedError(
            f"dimension {n} exceeds the lazari limit of {n_max}; use the structural method"
        )

    # c holds det(zI - Q), monic
    c = np.zeros(n + 1)
    c[n] = 1.0
    identity = np.eye(n)
    m = np.zeros((n, n))
    for k in range(1, n + 1):
        m = q @ m + c[n - k + 1] * identity
        c[n - k] = -np.trace(q @ m) / k
    return (-1) ** n * c


def deflate_unit_root(p, tol: float = DEFLATION_TOL) -> Tuple[int, np.ndarray]:
    p = np.asarray(p, dtype=float)
    threshold = tol * max(1.0, np.abs(p).max())
    if abs(P.polyval(1.0, p)) > threshold:
        raise DeflationError(
            f"input not stochastic-like: |p(1)| = {abs(P.polyval(1.0, p)):.3g} > {threshold:.3g}"
        )

    m1 = 0
    t_poly = p
    while len(t_poly) > 1:
        quotient, remainder = P.polydiv(t_poly, [-1.0, 1.0])
        if abs(remainder[0]) > threshold:
            break
        t_poly = quotient
        m1 += 1

    t_at_one = P.polyval(1.0, t_poly)
    if m1 == 0 or abs(t_at_one) <= threshold:
        raise DeflationError(
            f"ill-conditioned multiplicity: T(1) = {t_at_one:.3g} after {m1} divisions"
        )
    logger.debug("deflated unit root with multiplicity %d, T(1) = %.6g", m1, t_at_one)
    return m1, t_poly


def _matrix_polyval(coeffs: np.ndarray, q: np.ndarray) -> np.ndarray:
    identity = np.eye(q.shape[0])
    w = coeffs[-1] * identity
    for c in coeffs[-2::-1]:
        w = w @ q + c * identity
    return w


def cesaro_lazari(
    q,
    n_max: int = N_MAX_LAZARI,
    deflation_tol: float = DEFLATION_TOL,
    rowsum_tol: float = ROWSUM_TOL,
) -> CesaroResult:
    q = check_stochastic(q)
    p = char_poly(q, n_max=n_max)
    m1, t_poly = deflate_unit_root(p, tol=deflation_tol)

    w = _matrix_polyval(t_poly, q)
    sums = w.sum(axis=1)
    scale = np.abs(w).sum(axis=1).max()
    rowsum = sums.mean()
    if abs(rowsum) <= deflation_tol * scale:
        raise NormalizationError("lazari normalization failed: row sums of W vanish")
    spread = np.abs(sums - rowsum).max()
    if spread > rowsum_tol * abs(rowsum):
        raise NormalizationError(
            f"lazari normalization failed: row sums of W disagree (spread {spread:.3g}, mean {rowsum:.6g})"
        )
    return CesaroResult(q_star=w / rowsum, method="lazari", m1=m1)


# -------------------------
# Averaging
# -------------------------
def cesaro_averaging(
    q,
    tol: float = AVERAGING_TOL,
    n_max: int = AVERAGING_N_MAX,
    extrapolate: bool = True,
) -> CesaroResult:
    """Partial averages A_n = (1/n) sum_{m=1..n} Q^m for n = 1, 2, 4, ...

    Stops at the first n whose estimate differs from the next one by less than
    ``tol`` and returns the estimate at n.  With ``extrapolate`` the estimate is
    2 A_2n - A_n, which removes the 1/n term of the error and converges
    geometrically for aperiodic chains.  No partial sum past ``n_max`` is formed;
    without convergence the result carries the largest n reached.
    """
    q = check_stochastic(q)
    n = 1
    total = q.copy()
    power = q.copy()
    avg = total.copy()
    previous = None

    while True:
        if 2 * n > n_max:
            logger.warning("cesaro averaging did not converge within n_max=%d", n_max)
            return CesaroResult(
                q_star=previous if previous is not None else avg,
                method="averaging",
                iterations=n,
                converged=False,
                notes=[f"no convergence to {tol:g} within n_max={n_max}"],
            )

        total_2n = total + power @ total
        power_2n = power @ power
        avg_2n = total_2n / (2 * n)

        if extrapolate:
            estimate = 2.0 * avg_2n - avg
            if previous is not None and np.abs(previous - estimate).sum(axis=1).max() < tol:
                return CesaroResult(q_star=previous, method="averaging", iterations=n // 2)
            previous = estimate
        elif np.abs(avg - avg_2n).sum(axis=1).max() < tol:
            return CesaroResult(q_star=avg, method="averaging", iterations=n)

        total, power, avg, n = total_2n, power_2n, avg_2n, 2 * n


def horizon_sum(q, n: int) -> np.ndarray:
    """sum_{m=0..n-1} Q^m, by binary doubling."""
    q = np.asarray(q, dtype=float)
    identity = np.eye(q.shape[0])
    series = np.zeros_like(q)
    power = identity
    for bit in bin(n)[2:]:
        series = series + power @ series
        power = power @ power
        if bit == "1":
            series = identity + q @ series
            power = q @ power
    return series


# -------------------------
# Structural
# -------------------------
def _lu_solve(a: np.ndarray, b: np.ndarray, what: str) -> np.ndarray:
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    scale = max(1.0, np.abs(a).max())
    if np.abs(np.diag(lu)).min() <= _PIVOT_TOL * scale:
        raise DegenerateChainError(f"numerically degenerate chain: singular {what} system")
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    if not np.isfinite(x).all():
        raise DegenerateChainError(f"numerically degenerate chain: non-finite {what} solution")
    return x


def decompose_chain(q, edge_tol: float = EDGE_TOL) -> ChainDecomposition:
    q = check_stochastic(q)
    n = q.shape[0]
    edges = q > edge_tol
    n_comp, labels = scipy.sparse.csgraph.connected_components(
        scipy.sparse.csr_matrix(edges), directed=True, connection="strong"
    )

    classes = []
    for comp in range(n_comp):
        inside = labels == comp
        if not edges[inside][:, ~inside].any():
            classes.append(tuple(int(i) for i in np.flatnonzero(inside)))
    classes.sort()
    recurrent = np.zeros(n, dtype=bool)
    for members in classes:
        recurrent[list(members)] = True
    transient = tuple(int(i) for i in np.flatnonzero(~recurrent))

    stationary = []
    for members in classes:
        sub = q[np.ix_(members, members)]
        sub = sub / sub.sum(axis=1, keepdims=True)
        k = len(members)
        a = sub.T - np.eye(k)
        a[-1, :] = 1.0
        b = np.zeros(k)
        b[-1] = 1.0
        pi = _lu_solve(a, b, "stationary")
        pi = np.clip(pi, 0.0, None)
        stationary.append(pi / pi.sum())

    absorption = np.zeros((len(transient), len(classes)))
    if transient:
        t_idx = list(transient)
        one_step = np.column_stack([q[np.ix_(t_idx, list(c))].sum(axis=1) for c in classes])
        absorption = _lu_solve(np.eye(len(t_idx)) - q[np.ix_(t_idx, t_idx)], one_step, "absorption")
        absorption = np.clip(absorption, 0.0, None)
        absorption /= absorption.sum(axis=1, keepdims=True)

    logger.debug("chain: %d recurrent classes, %d transient states", len(classes), len(transient))
    return ChainDecomposition(
        recurrent_classes=classes,
        transient=transient,
        stationary=stationary,
        absorption=absorption,
    )


def cesaro_structural(q, edge_tol: float = EDGE_TOL) -> CesaroResult:
    q = check_stochastic(q)
    n = q.shape[0]
    chain = decompose_chain(q, edge_tol=edge_tol)

    embedded = np.zeros((len(chain.recurrent_classes), n))
    q_star = np.zeros((n, n))
    for c, (members, pi) in enumerate(zip(chain.recurrent_classes, chain.stationary)):
        embedded[c, list(members)] = pi
        q_star[list(members)] = embedded[c]
    if chain.transient:
        q_star[list(chain.transient)] = chain.absorption @ embedded

    return CesaroResult(q_star=q_star, method="structural", decomposition=chain)
