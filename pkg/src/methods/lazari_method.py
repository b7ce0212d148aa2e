import logging

from src.errors import CesaroError
from src.markov_analysis import cesaro_lazari, cesaro_structural
from src.methods.base_method import BaseCesaroMethod

logger = logging.getLogger(__name__)


class LazariMethod(BaseCesaroMethod):
    name = "lazari"

    def _compute(self, q):
        return cesaro_lazari(
            q,
            n_max=self.settings.get("n_max", 12),
            deflation_tol=self.settings.get("deflation_tol", 1e-7),
            rowsum_tol=self.settings.get("rowsum_tol", 1e-6),
        )


class LazariWithFallbackMethod(LazariMethod):
    """lazari when it succeeds, structural otherwise."""

    name = "auto"

    def _compute(self, q):
        try:
            return super()._compute(q)
        except CesaroError as e:
            logger.warning("lazari failed (%s); falling back to structural", e)
            result = cesaro_structural(q, edge_tol=self.settings.get("edge_tol", 1e-12))
            result.notes.append(f"lazari fallback: {e}")
            return result
