import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import cfobe

SMALL = """
num_aps = 3
antennas_per_ap = 2
num_ues = 2
area_side_m = 300
sweep_values = 2
schemes = MR, OBE
estimators = MMSE, GLS
direction = both
mc_samples = 400
obe_samples = 400
batches = 4
seed = 11
"""


def test_run_rows_and_keys():
    rows = cfobe.run(SMALL)
    assert len(rows) == 2 * 2 * 2 * 2
    assert list(rows[0]) == cfobe.CSV_HEADER.split(",")
    for r in rows:
        assert r["se_mc"] >= 0.0
        assert math.isfinite(r["se_cf"])
    assert cfobe.run(SMALL) == rows
    assert cfobe.run(SMALL, workers=2) == rows
    assert cfobe.run(SMALL, seed=12) != rows


def test_direction_override():
    rows = cfobe.run(SMALL, direction="dl", mc_samples=200)
    assert {r["direction"] for r in rows} == {"dl"}


def test_obe_beats_mr_closed_form():
    rows = cfobe.run(SMALL, direction="ul")
    for est in ("MMSE", "GLS"):
        for ue in range(2):
            pick = {r["scheme"]: r["se_cf"] for r in rows if r["estimator"] == est and r["ue"] == ue}
            assert pick["OBE"] >= pick["MR"] - 1e-12
    sinr = cfobe.obe_sinr(SMALL, "MMSE")
    cf = [r["sinr_cf"] for r in rows if r["scheme"] == "OBE" and r["estimator"] == "MMSE"]
    assert sinr == pytest.approx(cf, rel=1e-12)


def test_statistics_json_shape():
    doc = json.loads(cfobe.statistics_json(SMALL))
    assert isinstance(doc, dict)
    assert doc


def test_config_round_trip_and_errors():
    text = cfobe.normalize_config(SMALL)
    assert cfobe.normalize_config(text) == text
    with pytest.raises(ValueError):
        cfobe.normalize_config("colour = blue\n")


def test_kron_vec_identity():
    rng = np.random.default_rng(3)
    x, y, z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3))
    lhs = cfobe.vec(x @ y @ z)
    rhs = cfobe.kron(z.T, x) @ cfobe.vec(y)
    assert np.allclose(lhs.ravel(), rhs.ravel(), atol=1e-12)
    assert np.array_equal(cfobe.unvec(cfobe.vec(x), 2), x)
    assert np.allclose(cfobe.kron(x, y), np.kron(x, y), atol=1e-14)


def test_shipped_config_parses():
    root = Path(os.environ.get("CFOBE_SOURCE_DIR", Path(__file__).resolve().parents[2]))
    text = (root / "configs" / "desk.cfg").read_text()
    assert "num_aps = 10" in cfobe.normalize_config(text)
