"""Byte-stable JSON: sorted keys, floats as ``%.12e``, matrices row-major."""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .algebra import MonoidRepresentation


def matrix_to_json(M) -> dict:
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    d = {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
         "re": [float(v) for v in np.real(M).ravel()]}
    if np.iscomplexobj(M):
        d["im"] = [float(v) for v in np.imag(M).ravel()]
    return d


def matrix_from_json(d) -> np.ndarray:
    if not isinstance(d, dict) or "rows" not in d or "cols" not in d or "re" not in d:
        raise ValueError("matrix JSON needs rows, cols and re")
    rows, cols = int(d["rows"]), int(d["cols"])
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    re = np.asarray(d["re"], dtype=float)
    if re.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {re.size}")
    M = re.reshape(rows, cols)
    if "im" in d:
        im = np.asarray(d["im"], dtype=float)
        if im.size != rows * cols:
            raise ValueError("imaginary part has the wrong size")
        M = M + 1j * im.reshape(rows, cols)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def rep_from_json(d) -> MonoidRepresentation:
    if not isinstance(d, dict) or "dim" not in d:
        raise ValueError("representation JSON needs dim and generators")
    gens = [matrix_from_json(g) for g in d.get("generators", [])]
    if any(np.iscomplexobj(g) and np.any(g.imag) for g in gens):
        raise ValueError("generators must be real")
    return MonoidRepresentation(int(d["dim"]), [np.real(g) for g in gens])


def rep_to_json(rep: MonoidRepresentation) -> dict:
    return {"dim": rep.dim, "generators": [matrix_to_json(g) for g in rep.generators]}


def _write(obj: Any, out: list):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            out.append(json.dumps(str(v)))
        else:
            out.append("%.12e" % v)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)) + ": ")
            _write(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _write(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON text for ``obj``."""
    out: list = []
    _write(obj, out)
    return "".join(out) + "\n"
