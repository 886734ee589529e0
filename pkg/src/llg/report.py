"""Deterministic JSON and plain-text rendering of reports and tensors."""

from __future__ import annotations

import json
import math

import numpy as np


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent=2) -> str:
    """JSON with every float written to 17 significant digits.

    Key order is preserved, so equal inputs give byte-identical output.
    """
    return _dump(obj, indent, 0) + "\n"


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def component_label(symbol, idx, up):
    upper = "".join(str(i + 1) for i in idx[:up])
    lower = "".join(str(i + 1) for i in idx[up:])
    s = symbol
    if upper:
        s += f"^{upper}"
    if lower:
        s += f"_{{{lower}}}"
    return s


def tensor_lines(symbol, data, up, zero_tol=0.0):
    """One ``symbol^i_{jk} = value`` line per component larger than ``zero_tol``."""
    arr = np.asarray(data)
    if arr.ndim == 0:
        return [f"{symbol} = {_num(float(arr))}"]
    lines = [f"{component_label(symbol, idx, up)} = {_num(float(v))}"
             for idx, v in np.ndenumerate(arr) if abs(v) > zero_tol]
    return lines or [f"{symbol} = 0 (all components)"]


def render_report_text(rep) -> str:
    d = rep.to_dict()
    lines = [f"framing {d['framing']} ({d['hash']}), seed={d['seed']} points={d['points']}"]
    for c in d["checks"]:
        tag = "PASS" if c["pass"] else "FAIL"
        if c.get("informational"):
            tag = "info " + tag
        line = f"[{tag}] {c['name']}: max_defect={_num(c['max_defect'])} tol={_num(c['tol'])}"
        if c.get("note"):
            line += f"  ({c['note']})"
        lines.append(line)
    cert = d["certificate"]
    if cert:
        lines.append(f"flat: {str(d['flat']).lower()} (max curvature {_num(cert['max_curvature'])}, "
                     f"constant spread {_num(cert['max_constant_spread'])})")
    if d["constants"]:
        lines.extend(render_constants_text(d["constants"]))
    lines.append("overall: " + ("PASS" if d["pass"] else "FAIL"))
    return "\n".join(lines) + "\n"


def render_constants_text(c) -> list[str]:
    lines = ["structure constants:"]
    lines += ["  " + s for s in tensor_lines("C", c["C"], 1, 1e-12)]
    sc = c["scalar_curvature"]
    lines.append(f"scalar curvature: {_num(sc['metric'])} (from constants {_num(sc['from_constants'])}, "
                 f"spread {_num(sc['spread'])})")
    if c.get("NJhat"):
        lines.append(f"Nijenhuis constants (two-mode defect {_num(c['NJhat']['defect'])}):")
        lines += ["  " + s for s in tensor_lines("N", c["NJhat"]["definition"], 1, 1e-12)]
    if c.get("dOmegaHat"):
        lines.append(f"d(omega) constants (two-mode defect {_num(c['dOmegaHat']['defect'])}):")
        lines += ["  " + s for s in tensor_lines("dw", c["dOmegaHat"]["definition"], 0, 1e-12)]
    return lines
