from src.markov_analysis import cesaro_structural
from src.methods.base_method import BaseCesaroMethod


class StructuralMethod(BaseCesaroMethod):
    name = "structural"

    def _compute(self, q):
        return cesaro_structural(q, edge_tol=self.settings.get("edge_tol", 1e-12))
