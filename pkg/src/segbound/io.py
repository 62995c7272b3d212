"""Plain-text artifacts: data CSV, fit/set JSON, result tables.

Floats are written with ``repr`` (shortest round-trip form), so the same
numbers give the same bytes everywhere. JSON documents carry a ``schema``
tag and a ``units`` block; every artifact may embed a ``meta`` block
(config, seed, versions).

Data CSV::

    strain,stress
    -0.0059,-10.31
    ...

strain is dimensionless, stress in MPa.
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .errors import DataError
from .segfit import LineParams, MaterialDataSet, SegmentedFit
from .uncertainty import UncertaintySet

__all__ = [
    "read_data_csv",
    "write_data_csv",
    "fit_to_dict",
    "fit_from_dict",
    "set_to_dict",
    "set_from_dict",
    "read_json",
    "write_json",
    "load_fit",
    "load_set",
    "write_table",
    "read_table",
    "versions",
    "to_plain",
    "cell",
    "collection",
    "load_groups",
]

FIT_SCHEMA = "segbound.fit/1"
# the (epsilon, delta) statement rests on this; nothing here can check it
IID_ASSUMPTION = "data points are continuous i.i.d. samples (assumed, not verified)"
SET_SCHEMA = "segbound.set/1"


def _num(x) -> str:
    return repr(float(x))


def versions() -> dict:
    from . import __version__
    return {"segbound": __version__, "numpy": np.__version__,
            "python": platform.python_version()}


def read_data_csv(path, label: str | None = None) -> MaterialDataSet:
    """Read ``strain,stress`` rows. Unordered rows are sorted by strain."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read data file {path}: {exc}") from exc
    if not rows or [c.strip().lower() for c in rows[0]] != ["strain", "stress"]:
        raise DataError(f"{path}: first line must be the header 'strain,stress'")
    pts = []
    for n, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DataError(f"{path}:{n}: expected 2 fields, got {len(row)}")
        try:
            pts.append((float(row[0]), float(row[1])))
        except ValueError:
            raise DataError(f"{path}:{n}: not a number: {row!r}") from None
    if not pts:
        raise DataError(f"{path}: no data rows")
    return MaterialDataSet.from_points(pts, label=Path(path).stem if label is None else label)


def write_data_csv(data: MaterialDataSet, path):
    lines = ["strain,stress"]
    lines += [f"{_num(e)},{_num(s)}" for e, s in zip(data.strain, data.stress)]
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text):
    try:
        Path(path).write_text(text, newline="\n")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc


def to_plain(obj):
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(doc: dict, path):
    _write_text(path, json.dumps(to_plain(doc), indent=2, sort_keys=True) + "\n")


# fit

def fit_to_dict(fit: SegmentedFit, meta: dict | None = None) -> dict:
    doc = {
        "schema": FIT_SCHEMA,
        "units": {"strain": "1", "stress": "MPa"},
        "form": "alpha*strain + beta*stress = gamma",
        "k": fit.k,
        "mu": fit.mu,
        "lines": [{"alpha": ln.alpha, "beta": ln.beta, "gamma": ln.gamma} for ln in fit.lines],
        "breaks": list(fit.breaks),
        "block_errors": list(fit.block_errors),
        "sq_error": fit.sq_error,
        "penalty": fit.penalty,
        "objective": fit.objective,
    }
    if meta is not None:
        doc["meta"] = meta
    return doc


def fit_from_dict(doc: dict) -> SegmentedFit:
    if doc.get("schema") != FIT_SCHEMA:
        raise DataError(f"not a fit document (schema {doc.get('schema')!r})")
    try:
        lines = [LineParams(float(d["alpha"]), float(d["beta"]), float(d["gamma"]))
                 for d in doc["lines"]]
        return SegmentedFit(lines=lines, breaks=[int(b) for b in doc["breaks"]],
                            sq_error=float(doc["sq_error"]), penalty=float(doc["penalty"]),
                            objective=float(doc["objective"]), k=int(doc.get("k", len(lines))),
                            mu=float(doc.get("mu", 0.0)),
                            block_errors=[float(v) for v in doc.get("block_errors", [])])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed fit document: {exc}") from exc


def load_fit(path) -> SegmentedFit:
    return fit_from_dict(read_json(path))


# uncertainty set

def set_to_dict(uset: UncertaintySet, meta: dict | None = None) -> dict:
    doc = {
        "schema": SET_SCHEMA,
        "units": {"strain": "1", "stress": "MPa",
                  "note": "geometry in scaled coordinates (strain / strain_unit, stress)"},
        "label": uset.label,
        "strain_unit": uset.strain_unit,
        "lines": uset.lines,
        "separators": uset.seps,
        "breakpoints": uset.breakpoints,
        "tau": uset.tau,
        "ptilde": uset.ptilde,
        "epsilon": uset.epsilon,
        "delta": uset.delta,
        "eps_bi": uset.eps_bi,
        "data_bbox": list(uset.bbox) if uset.bbox is not None else None,
    }
    if uset.epsilon is not None:
        doc["reliability"] = 1.0 - uset.epsilon
    if uset.delta is not None:
        doc["confidence"] = 1.0 - uset.delta
    if meta is not None:
        doc["meta"] = meta
    return doc


def set_from_dict(doc: dict) -> UncertaintySet:
    if doc.get("schema") != SET_SCHEMA:
        raise DataError(f"not an uncertainty-set document (schema {doc.get('schema')!r})")
    try:
        lines = np.array(doc["lines"], dtype=float).reshape(-1, 3)
        seps = np.array(doc["separators"], dtype=float).reshape(-1, 3)
        bps = np.array(doc["breakpoints"], dtype=float).reshape(-1, 2)
        bbox = doc.get("data_bbox")
        return UncertaintySet(
            lines=lines, seps=seps, breakpoints=bps, tau=float(doc["tau"]),
            strain_unit=float(doc.get("strain_unit", 1.0)),
            ptilde=None if doc.get("ptilde") is None else int(doc["ptilde"]),
            epsilon=doc.get("epsilon"), delta=doc.get("delta"), eps_bi=doc.get("eps_bi"),
            label=str(doc.get("label", "")),
            bbox=None if bbox is None else tuple(float(v) for v in bbox))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed uncertainty-set document: {exc}") from exc


def load_set(path) -> UncertaintySet:
    return set_from_dict(read_json(path))


# result tables

def write_table(path, header: list[str], rows, comments: list[str] = ()):
    """CSV with optional leading ``# key: value`` comment lines."""
    out = [f"# {c}" for c in comments]
    out.append(",".join(header))
    for row in rows:
        out.append(",".join(cell(v) for v in row))
    _write_text(path, "\n".join(out) + "\n")


def cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return _num(v)
    return str(v)


def read_table(path) -> tuple[list[str], list[dict]]:
    """(comment lines, rows as dicts of strings)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    comments = [ln[2:] for ln in text.splitlines() if ln.startswith("# ")]
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return comments, list(csv.DictReader(body))


def collection(kind: str, docs: dict, meta: dict | None = None) -> dict:
    """Per-group bundle of fit or set documents."""
    doc = {"schema": f"segbound.{kind}-groups/1", "groups": docs}
    if meta is not None:
        doc["meta"] = meta
    return doc


def load_groups(path, kind: str) -> dict:
    """Read a fit or set file: a single document or a per-group bundle.

    A single document is keyed by its label, or "default" without one.
    """
    doc = read_json(path)
    conv = fit_from_dict if kind == "fit" else set_from_dict
    if doc.get("schema") == f"segbound.{kind}-groups/1":
        return {g: conv(d) for g, d in doc["groups"].items()}
    return {doc.get("label") or "default": conv(doc)}
