"""Deterministic JSON serialization: shortest round-trip floats, atomic writes."""

import json
import math
import os

import numpy as np
import pytest

from negcurve import ArgumentError
from negcurve.serialize import (
    atomic_write_text,
    dumps,
    format_float,
    loads,
    read_jsonl,
    write_jsonl,
)


def test_format_float_round_trips():
    vals = [0.1, 1.0 / 3.0, 1e308, 5e-324, -0.0, 2.0**53 + 1.0, math.pi]
    for v in vals:
        assert float(format_float(v)) == v or (v != v)


def test_format_float_tokens():
    assert format_float(float("inf")) == "Infinity"
    assert format_float(float("-inf")) == "-Infinity"
    assert format_float(float("nan")) == "NaN"
    assert loads(dumps({"a": float("inf")}))["a"] == float("inf")


def test_dumps_is_deterministic_and_parseable():
    obj = {"z": [1.5, -0.0, 3], "a": {"nested": True, "v": None},
           "arr": np.array([1.0, 2.5]), "i": np.int64(7)}
    s1, s2 = dumps(obj), dumps(obj)
    assert s1 == s2
    back = json.loads(s1)
    assert back["z"][0] == 1.5
    assert back["arr"] == [1.0, 2.5]
    assert back["i"] == 7
    # insertion order is preserved (not sorted)
    assert s1.index('"z"') < s1.index('"a"')


def test_dumps_rejects_unknown_types():
    with pytest.raises(ArgumentError):
        dumps({"bad": object()})
    with pytest.raises(ArgumentError):
        dumps({1: "non-string key"})


def test_atomic_write_and_jsonl(tmp_path):
    p = tmp_path / "x.txt"
    atomic_write_text(str(p), "hello\n")
    assert p.read_text() == "hello\n"
    # no temp file left behind
    assert sorted(os.listdir(tmp_path)) == ["x.txt"]

    rows = [{"k": 0, "v": [1.0, 2.0]}, {"k": 1, "v": None}]
    jp = tmp_path / "rows.jsonl"
    write_jsonl(str(jp), rows)
    text = jp.read_text()
    assert len(text.strip().splitlines()) == 2
    assert "\n " not in text  # compact, one line per record
    assert read_jsonl(str(jp)) == rows


def test_bitwise_float_stability():
    # serializing and parsing a full-precision float is the identity
    rng = np.random.default_rng(0)
    xs = rng.normal(size=200) * 10.0 ** rng.integers(-300, 300, size=200)
    s = dumps(list(xs))
    back = np.array(json.loads(s), dtype=float)
    assert np.array_equal(back, xs)
