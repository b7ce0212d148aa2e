"""Exception hierarchy shared by the solver, the simulator and the CLI."""


class PismgError(Exception):
    """Base class; the CLI turns any of these into exit status 1."""


class GameFormatError(PismgError, ValueError):
    """Game file is not valid JSON or does not follow the schema."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class GameValidationError(PismgError, ValueError):
    """A GameSpec invariant does not hold."""

    def __init__(self, message, state=None, action=None):
        where = []
        if state is not None:
            where.append(f"state {state}")
        if action is not None:
            where.append(f"action {action}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.state = state
        self.action = action


class MatrixError(PismgError, ValueError):
    """Input matrix is not square or not row-stochastic."""


class CesaroError(PismgError, RuntimeError):
    """A Cesàro limit could not be computed by the requested method."""


class LazariRefusedError(CesaroError):
    """Dimension above the lazari cap; use the structural method instead."""


class DeflationError(CesaroError):
    """Unit-root deflation of a characteristic polynomial failed."""


class NormalizationError(CesaroError):
    """Row sums of W = T(Q) disagree or vanish."""


class DegenerateChainError(CesaroError):
    """A stationary or absorption linear system is numerically singular."""


class EnumerationCapError(PismgError, ValueError):
    def __init__(self, player, count, cap):
        super().__init__(
            f"player {player} has {count} pure stationary strategies, above the cap of {cap}"
        )
        self.player = player
        self.count = count
        self.cap = cap


class PayoffError(PismgError, RuntimeError):
    """Payoff evaluation failed for one strategy pair."""

    def __init__(self, row, col, cause):
        super().__init__(f"payoff for pair (f{row + 1}, g{col + 1}) failed: {cause}")
        self.row = row
        self.col = col


class TheoremViolationError(PismgError, RuntimeError):
    """A payoff matrix of a perfect-information game has no pure saddle."""

    def __init__(self, matrix):
        super().__init__(
            f"pure saddle property violated: payoff matrix for initial state {matrix.initial_state} "
            f"({matrix.rows}x{matrix.cols}) has no pure saddle point"
        )
        self.matrix = matrix


class SaddleConsistencyError(PismgError, RuntimeError):
    """Saddle search results contradict each other; points at a numerical fault."""

    def __init__(self, initial_state, message):
        where = f"initial state {initial_state}" if initial_state is not None else "payoff matrix"
        super().__init__(f"inconsistent saddle search for {where}: {message}")
        self.initial_state = initial_state
