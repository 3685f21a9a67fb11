import json

import numpy as np
import pytest

from zeno_tsvf.emit import emit, format_float, to_csv_bytes, to_json_bytes
from zeno_tsvf.tsvf import forward_evolve


class TestFloats:
    @pytest.mark.parametrize("x,text", [(1.0, "1"), (0.1, "0.10000000000000001"),
                                        (-0.0, "0"), (1e-300, "1e-300")])
    def test_format(self, x, text):
        assert format_float(x) == text

    @pytest.mark.parametrize("x", [0.1, 1 / 3, 2 ** -1074, 1.7976931348623157e308, -2.5e-17])
    def test_round_trip(self, x):
        assert float(format_float(x)) == x

    def test_non_finite(self):
        with pytest.raises(ValueError):
            format_float(float("nan"))


class TestJson:
    def test_sorted_and_terminated(self):
        b = to_json_bytes({"b": 1, "a": [0.5, np.float64(2.0)], "c": {}})
        assert b.endswith(b"}\n")
        assert b.index(b'"a"') < b.index(b'"b"') < b.index(b'"c"')
        assert json.loads(b) == {"a": [0.5, 2.0], "b": 1, "c": {}}

    def test_report(self, sched):
        _, rep = forward_evolve(sched(2, 2, 1))
        doc = json.loads(emit(rep, "json"))
        assert doc["p_D2"] == pytest.approx(0.140625)

    def test_table(self):
        doc = json.loads(emit((["x"], [[1.5]]), "json"))
        assert doc == {"columns": ["x"], "rows": [[1.5]]}

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            to_json_bytes({"x": object()})


class TestCsv:
    def test_layout(self):
        b = to_csv_bytes(["a", "b"], [[1, 0.25], ["", None]])
        assert b == b"a,b\n1,0.25\n,\n"

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            to_csv_bytes(["a"], [[1, 2]])

    def test_identical_bytes(self, sched):
        _, r1 = forward_evolve(sched(3, 3, 1))
        _, r2 = forward_evolve(sched(3, 3, 1))
        assert emit(r1, "csv") == emit(r2, "csv")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit({}, "xml")
