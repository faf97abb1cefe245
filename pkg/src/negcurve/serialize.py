r"""Deterministic JSON emission with full float64 fidelity.

Every real number is written with 17 significant digits (round-half-even,
the IEEE-754 default), which round-trips float64 exactly; infinities are
written as the bare tokens Infinity/-Infinity (accepted by the stdlib
parser).  Keys are emitted in insertion order and all writers construct
their dicts deterministically, so reports are byte-identical across runs
and platforms.  Parsing uses the stdlib json module.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .errors import ArgumentError


def format_float(x: float) -> str:
    """17-significant-digit decimal form of a float64 (exact round trip)."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def _emit(obj, out: list, indent: int | None, level: int) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out, indent, level)
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        nl, pad, pad_in = _pads(indent, level)
        out.append("{" + nl)
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise ArgumentError(f"JSON keys must be strings, got {type(k).__name__}")
            out.append(pad_in + json.dumps(k) + (": " if indent is not None else ":"))
            _emit(v, out, indent, level + 1)
            if i != len(obj) - 1:
                out.append("," + nl)
        out.append(nl + pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        nl, pad, pad_in = _pads(indent, level)
        out.append("[" + nl)
        for i, v in enumerate(obj):
            out.append(pad_in)
            _emit(v, out, indent, level + 1)
            if i != len(obj) - 1:
                out.append("," + nl)
        out.append(nl + pad + "]")
    else:
        raise ArgumentError(f"cannot serialize {type(obj).__name__}")


def _pads(indent, level):
    if indent is None:
        return "", "", ""
    return "\n", " " * (indent * level), " " * (indent * (level + 1))


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize to a deterministic JSON string (17-digit reals)."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def loads(text: str):
    """Parse JSON (stdlib; accepts the Infinity/NaN tokens we emit)."""
    return json.loads(text)


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a same-directory temp file and atomic rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_jsonl(path: str, rows: list) -> None:
    """One compact JSON document per line, written atomically."""
    atomic_write_text(path, "\n".join(dumps(r, indent=None) for r in rows) + "\n")


def read_jsonl(path: str) -> list:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
