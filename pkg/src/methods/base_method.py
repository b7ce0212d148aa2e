from src.markov_analysis import CesaroResult, check_stochastic


class BaseCesaroMethod:
    name = "base"

    def __init__(self, **settings):
        self.settings = settings

    def limit(self, q) -> CesaroResult:
        """Return the Cesàro limit of a row-stochastic matrix."""
        return self._compute(check_stochastic(q))

    def _compute(self, q) -> CesaroResult:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.settings})"
