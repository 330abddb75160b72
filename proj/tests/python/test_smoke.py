import math

import pytest

hardylab = pytest.importorskip("hardylab")


def test_version_and_fixtures():
    assert hardylab.version()
    names = {f["name"] for f in hardylab.list_fixtures()}
    assert {"cantor", "punctured_disk", "interval", "radial"} <= names


def test_half_line_constant():
    res = hardylab.run({"command": "hardy", "builder": "interval", "form": "line"})
    truncated = 1.0 / (0.25 + (math.pi / math.log(1e20)) ** 2)
    assert abs(res["summary"]["results"]["hardy_constant"] - truncated) <= 0.03 * truncated
    assert res["provenance"]["random_free"] is True
    assert "trace" in res["tables"]


def test_cantor_dimensions():
    res = hardylab.run({"command": "dim", "builder": "cantor"})
    d = math.log(2) / math.log(3)
    r = res["summary"]["results"]
    assert abs(r["assouad_upper"] - d) <= 0.05
    assert abs(r["assouad_lower"] - d) <= 0.05


def test_writes_bundle(tmp_path):
    hardylab.run({"command": "frostman", "builder": "cantor"}, out=str(tmp_path), formats=["csv"])
    assert (tmp_path / "growth.csv").exists()
    assert not (tmp_path / "summary.json").exists()


def test_errors():
    with pytest.raises(hardylab.ConfigError):
        hardylab.run({"command": "dim", "builder": "nope"})
    with pytest.raises(ValueError):
        hardylab.run({"command": "dim", "builder": "cantor", "bogus": 1})
    with pytest.raises(hardylab.HardylabError):
        hardylab.run({"command": "hardy", "builder": "punctured_square", "hs": [0.3, 0.2, 0.1]})
