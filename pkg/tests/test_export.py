import json
import math
import xml.etree.ElementTree as ET

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rydberg3b.export import (RunManifest, read_csv, svg_curves, svg_heatmap, write_csv, write_field_csv,
                              write_json)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=20))
def test_csv_round_trip_is_exact(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "a.csv"
    write_csv(path, {"x": np.arange(len(values)), "y": values})
    back = read_csv(path)
    assert np.array_equal(back["y"], np.asarray(values))


def test_csv_column_order_and_length(tmp_path):
    write_csv(tmp_path / "a.csv", {"zeta": [1.0], "alpha": [2.0]})
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "zeta,alpha"
    try:
        write_csv(tmp_path / "b.csv", {"a": [1.0], "b": [1.0, 2.0]})
    except ValueError:
        pass
    else:
        raise AssertionError("unequal columns accepted")


def test_field_csv_layout(tmp_path):
    write_field_csv(tmp_path / "f.csv", [0.0, 1.0], [0.0, 2.0, 3.0], {"v": np.arange(6.0).reshape(2, 3)})
    d = read_csv(tmp_path / "f.csv")
    assert list(d) == ["eta", "zeta", "v"]
    assert np.array_equal(d["zeta"], [0, 2, 3, 0, 2, 3]) and np.array_equal(d["v"], np.arange(6.0))


def test_json_handles_numpy_and_nan(tmp_path):
    write_json(tmp_path / "a.json", {"b": np.float64(math.nan), "a": np.arange(3), "c": np.bool_(True)})
    d = json.loads((tmp_path / "a.json").read_text())
    assert d == {"a": [0, 1, 2], "b": "nan", "c": True}


def test_manifest_is_deterministic(tmp_path):
    write_csv(tmp_path / "x.csv", {"a": [1.0]})
    m1 = RunManifest("t", {"p": 1}, "0", wall_time=1.0)
    m2 = RunManifest("t", {"p": 1}, "0", wall_time=2.0)
    for m in (m1, m2):
        m.add(tmp_path / "x.csv")
    assert m1.deterministic(tmp_path) == m2.deterministic(tmp_path)
    assert "wall_time" not in m1.deterministic(tmp_path)


def test_svg_is_well_formed(tmp_path):
    x = np.linspace(-1, 1, 5)
    svg_heatmap(tmp_path / "h.svg", x, x, np.outer(x, x), title="t")
    svg_curves(tmp_path / "c.svg", x, {"a": x**2, "b": np.where(x > 0, np.nan, x)}, title="c")
    for name in ("h.svg", "c.svg"):
        root = ET.parse(tmp_path / name).getroot()
        assert root.tag.endswith("svg")
