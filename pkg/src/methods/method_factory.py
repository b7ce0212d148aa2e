from src.methods.base_method import BaseCesaroMethod
from src.methods.averaging_method import AveragingMethod
from src.methods.lazari_method import LazariMethod, LazariWithFallbackMethod
from src.methods.structural_method import StructuralMethod
from utils.utils import load_method_settings

METHODS = ("structural", "lazari", "averaging", "auto")


class CesaroMethodFactory:
    @staticmethod
    def create(method: str, **settings) -> BaseCesaroMethod:
        method = method.lower().strip()

        if method == "structural":
            return StructuralMethod(**settings)

        elif method == "lazari":
            return LazariMethod(**settings)

        elif method == "averaging":
            return AveragingMethod(**settings)

        elif method == "auto":
            return LazariWithFallbackMethod(**settings)

        else:
            raise ValueError(f"[ERROR] Unknown Cesaro method: {method}")

    @staticmethod
    def from_config(method: str, **overrides) -> BaseCesaroMethod:
        """Build a method with its block of config/solver_settings.json, then overrides."""
        settings = load_method_settings("lazari" if method.lower().strip() == "auto" else method)
        if method.lower().strip() == "auto":
            settings.update(load_method_settings("structural"))
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return CesaroMethodFactory.create(method, **settings)
