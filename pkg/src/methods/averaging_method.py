from src.markov_analysis import cesaro_averaging
from src.methods.base_method import BaseCesaroMethod


class AveragingMethod(BaseCesaroMethod):
    name = "averaging"

    def _compute(self, q):
        return cesaro_averaging(
            q,
            tol=self.settings.get("tol", 1e-10),
            n_max=self.settings.get("n_max", 10**6),
            extrapolate=self.settings.get("extrapolate", True),
        )
