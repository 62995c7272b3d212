"""Writer for the CPLEX LP text format.

Layout::

    \\ comment lines
    Minimize | Maximize
     obj: <linear terms> [+ constant]
    Subject To
     <row name>: <linear terms> <= | = | >= <rhs>
    Bounds
     <lb> <= <var> <= <ub>
    Binaries
     <var> ...
    End

Names are sanitized to ``[A-Za-z0-9_.]`` and must not start with a digit.
Numbers are written with ``repr`` so the text round-trips exactly.
"""

from __future__ import annotations

import re

from .model import MilpModel

__all__ = ["write_lp", "lp_name"]

_BAD = re.compile(r"[^A-Za-z0-9_.]")


def lp_name(name: str) -> str:
    s = _BAD.sub("_", name)
    if not s or s[0].isdigit() or s[0] == ".":
        s = "x_" + s
    return s


def _num(v: float) -> str:
    return repr(float(v) + 0.0)


def _linear(coefs: dict[int, float], names: list[str]) -> str:
    if not coefs:
        return "0 " + names[0] if names else "0"
    parts = []
    for j in sorted(coefs):
        a = float(coefs[j]) + 0.0
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {_num(abs(a))} {names[j]}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def write_lp(model: MilpModel, path=None) -> str:
    names = [lp_name(nm) for nm in model.names]
    if len(set(names)) != len(names):
        names = [f"{nm}_{j}" for j, nm in enumerate(names)]
    out = [f"\\ {model.name}", f"\\ variables {model.n}, rows {model.n_rows}"]
    out.append("Minimize" if model.sense == "min" else "Maximize")
    obj = " obj: " + _linear(model.obj, names)
    if model.obj_const:
        c = model.obj_const
        obj += f" {'-' if c < 0 else '+'} {_num(abs(c))}"
    out.append(obj)
    out.append("Subject To")
    sym = {"<=": "<=", "=": "=", ">=": ">="}
    for i, row in enumerate(model.rows):
        out.append(f" {lp_name(model.row_names[i])}: {_linear(row, names)} "
                   f"{sym[model.row_senses[i]]} {_num(model.rhs[i])}")
    out.append("Bounds")
    for j, nm in enumerate(names):
        if model.binary[j] and model.lb[j] == 0.0 and model.ub[j] == 1.0:
            continue
        if model.lb[j] == model.ub[j]:
            out.append(f" {nm} = {_num(model.lb[j])}")
        else:
            out.append(f" {_num(model.lb[j])} <= {nm} <= {_num(model.ub[j])}")
    bins = [names[j] for j in range(model.n) if model.binary[j]]
    if bins:
        out.append("Binaries")
        out.extend(f" {nm}" for nm in bins)
    out.append("End")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
