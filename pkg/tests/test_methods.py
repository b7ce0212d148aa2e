import json

import numpy as np
import pytest

from src.errors import LazariRefusedError, MatrixError
from src.methods.averaging_method import AveragingMethod
from src.methods.lazari_method import LazariMethod, LazariWithFallbackMethod
from src.methods.method_factory import METHODS, CesaroMethodFactory
from src.methods.structural_method import StructuralMethod
from utils.utils import load_method_settings


@pytest.mark.parametrize(
    "name, cls",
    [
        ("structural", StructuralMethod),
        ("lazari", LazariMethod),
        ("averaging", AveragingMethod),
        ("auto", LazariWithFallbackMethod),
        ("  Lazari ", LazariMethod),
    ],
)
def test_factory_builds_each_method(name, cls):
    method = CesaroMethodFactory.create(name)
    assert type(method) is cls


def test_factory_rejects_unknown_method():
    with pytest.raises(ValueError, match="Unknown Cesaro method"):
        CesaroMethodFactory.create("power-iteration")


def test_from_config_reads_settings_block():
    method = CesaroMethodFactory.from_config("lazari")
    assert method.settings["deflation_tol"] == load_method_settings("lazari")["deflation_tol"]


def test_from_config_overrides_and_skips_none():
    method = CesaroMethodFactory.from_config("averaging", tol=1e-4, n_max=None)
    assert method.settings["tol"] == 1e-4
    assert method.settings["n_max"] == load_method_settings("averaging")["n_max"]


def test_auto_carries_structural_settings():
    method = CesaroMethodFactory.from_config("auto")
    assert "edge_tol" in method.settings
    assert "n_max" in method.settings


@pytest.mark.parametrize("name", METHODS)
def test_every_method_validates_input(name):
    with pytest.raises(MatrixError):
        CesaroMethodFactory.create(name).limit([[0.5, 0.4], [0.0, 1.0]])


def test_lazari_refuses_large_matrix():
    q = np.full((13, 13), 1 / 13)
    with pytest.raises(LazariRefusedError):
        CesaroMethodFactory.create("lazari").limit(q)


def test_auto_falls_back_to_structural():
    q = np.full((13, 13), 1 / 13)
    result = CesaroMethodFactory.create("auto").limit(q)
    assert result.method == "structural"
    assert any("lazari fallback" in note for note in result.notes)
    np.testing.assert_allclose(result.q_star, q, atol=1e-12)


def test_unknown_settings_block():
    with pytest.raises(ValueError, match="No settings block"):
        load_method_settings("simplex")


def test_alternate_config_file(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"structural": {"edge_tol": 0.25}}), encoding="utf-8")
    monkeypatch.setenv("PISMG_CONFIG", str(path))
    assert load_method_settings("structural") == {"edge_tol": 0.25}


def test_max_workers_from_environment(monkeypatch):
    monkeypatch.setenv("PISMG_MAX_WORKERS", "3")
    assert load_method_settings("solver")["max_workers"] == 3
