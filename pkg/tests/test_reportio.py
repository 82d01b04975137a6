"""Serialization determinism tests."""

import math

import numpy as np

from hardylab.reportio import dumps_csv, dumps_json, format_float


class TestFloatFormat:
    def test_seventeen_digits_roundtrip(self):
        for x in (0.1, 1 / 3, math.pi, 0.0901699437494742, 1e-300, 123456.789):
            assert float(format_float(x)) == x

    def test_negative_zero(self):
        assert format_float(-0.0) == "0"

    def test_nan_is_null(self):
        assert format_float(float("nan")) == "null"


class TestJson:
    def test_key_order_preserved(self):
        a = dumps_json({"b": 1, "a": 2})
        assert a.index('"b"') < a.index('"a"')

    def test_deterministic(self):
        obj = {"x": [1.5, {"y": 0.1}], "z": "s", "w": None, "ok": True}
        assert dumps_json(obj) == dumps_json(obj)

    def test_numpy_scalars(self):
        text = dumps_json({"v": np.float64(0.25), "n": np.int64(3)})
        assert "0.25" in text and "3" in text

    def test_valid_json(self):
        import json

        obj = {"a": [0.1, float("nan")], "s": 'quote " and \\ and\nnewline'}
        parsed = json.loads(dumps_json(obj))
        assert parsed["a"][0] == 0.1
        assert parsed["a"][1] is None
        assert parsed["s"] == 'quote " and \\ and\nnewline'


class TestCsv:
    def test_header_and_rows(self):
        text = dumps_csv(["a", "b"], [[1.5, "x"], [None, 'has,comma']])
        lines = text.strip().split("\n")
        assert lines[0] == "a,b"
        assert lines[1] == "1.5,x"
        assert lines[2] == ',"has,comma"'

    def test_float_precision(self):
        text = dumps_csv(["v"], [[1 / 3]])
        assert "0.33333333333333331" in text
