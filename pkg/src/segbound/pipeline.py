"""End-to-end run: data -> fit -> set -> bounds -> reference -> plots.

Artifacts (in ``outdir``):

    data-<group>.csv   generated data (only when no CSV was given)
    fit.json           segmented fit per group
    set.json           calibrated uncertainty set per group
    bounds.csv         lam, q_lower, q_upper, gaps, reference, containment
    reference.csv      reference equilibrium path
    bounds.svg         bounds and reference against load factor
    scatter.svg        data, band and extreme member states at the last lam
                       (one scatter-<group>.svg per group when there are several)

Everything is written to a scratch directory next to ``outdir`` and moved
in only when all stages succeed.
"""

from __future__ import annotations

import json
import shutil
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import io
from .boundprob import infer_boxes, parse_qoi, sweep
from .datagen import gen_data, ground_truth
from .errors import DataError, SegboundError
from .orderstats import ReliabilitySpec, compute_ptilde
from .plotting import bounds_svg, scatter_svg
from .refsolver import law_from_fit, solve_path
from .segfit import segment_dp
from .structure import assemble, builtin_models, load_model
from .uncertainty import build_geometry, calibrate_tau

__all__ = ["RunConfig", "RunResult", "PipelineError", "ContainmentFailure", "run_pipeline",
           "resolve_model", "DEFAULT_QOI"]

DEFAULT_QOI = {"truss-3x2": "uy:node=r3c4", "cable-strut": "uz:node=T1", "bar": "ux:node=B",
               "two-bar": "uy:node=tip", "three-bar": "uy:node=tip", "braced-panel": "uy:node=n3"}


class PipelineError(SegboundError):
    """A stage failed; carries the stage name and the exit code of the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)


class ContainmentFailure(SegboundError):
    exit_code = 6

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


@dataclass
class RunConfig:
    model: str = "truss-3x2"                            # built-in name or structure file
    data: dict = field(default_factory=dict)            # group -> CSV path; missing groups generated
    epsilon: float = 0.1
    delta: float = 0.1
    k: int = 5
    mu: float = 2.0
    lambdas: list = field(default_factory=lambda: [round(0.1 * i, 10) for i in range(1, 11)])
    qoi: str | None = None
    outdir: str = "run"
    seed: int = 0
    strain_unit: float = 1e-3
    eps_bi: float = 1e-7
    allow_nonpositive_slope: bool = False
    flat_m: float | None = None
    gap_tol: float = 1e-6
    node_limit: int = 200_000
    reference: bool = True
    check_containment: bool = True
    timestamp: bool = False

    def validate(self):
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise DataError("epsilon and delta must lie in ]0,1[")
        if self.k < 1:
            raise DataError("k must be at least 1")
        if self.mu < 0:
            raise DataError("mu must be non-negative")
        if not self.lambdas:
            raise DataError("empty load-factor grid")
        for g, path in self.data.items():
            if not Path(path).is_file():
                raise DataError(f"data file for group {g!r} not found: {path}")
        if self.model not in builtin_models() and not Path(self.model).is_file():
            raise DataError(f"model {self.model!r} is neither built in nor an existing file")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    outdir: Path
    artifacts: list
    bounds: list            # (lam, BoundResult)
    reference: list         # q per lam, or empty
    sets: dict
    contained: bool


def resolve_model(name_or_path: str):
    table = builtin_models()
    if name_or_path in table:
        return table[name_or_path]
    return load_model(name_or_path)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SegboundError as exc:
        raise PipelineError(name, exc) from exc
    except (KeyError, ValueError) as exc:
        raise PipelineError(name, DataError(str(exc))) from exc


def _group_materials(model) -> dict:
    used = sorted({mem.group for mem in model.members})
    return {g: model.groups.get(g, g) for g in used}


def run_pipeline(cfg: RunConfig) -> RunResult:
    """Run every stage; raise PipelineError (stage-tagged) or ContainmentFailure.

    Generated data for the n-th group (sorted by name) uses seed ``cfg.seed + n``.
    """
    _stage("config", cfg.validate)
    model = _stage("model", resolve_model, cfg.model)
    system = _stage("model", assemble, model)
    qtext = cfg.qoi or DEFAULT_QOI.get(model.name)
    if qtext is None:
        raise PipelineError("config", DataError("no quantity of interest given"))
    qoi = _stage("qoi", parse_qoi, qtext, model, system)

    outdir = Path(cfg.outdir)
    outdir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".segbound-", dir=outdir.parent))
    try:
        result = _run(cfg, model, system, qoi, tmp)
        outdir.mkdir(parents=True, exist_ok=True)
        names = []
        for f in sorted(tmp.iterdir()):
            shutil.move(str(f), outdir / f.name)
            names.append(f.name)
        result.outdir = outdir
        result.artifacts = names
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    if cfg.check_containment and cfg.reference and not result.contained:
        bad = [(lam, q) for (lam, res), q in zip(result.bounds, result.reference)
               if not hasattr(res, "contains") or not res.contains(q, tol=1e-9 * max(1, abs(q)))]
        raise ContainmentFailure(
            "reference outside the bounds at lambda = " + ", ".join(f"{l:g}" for l, _ in bad),
            bad)
    return result


def _run(cfg, model, system, qoi, out: Path) -> RunResult:
    versions = io.versions()
    materials = _group_materials(model)
    datasets, fits, sets = {}, {}, {}
    for n, (g, material) in enumerate(sorted(materials.items())):
        if g in cfg.data:
            data = _stage("data", io.read_data_csv, cfg.data[g], label=g)
        else:
            gt = _stage("data", ground_truth, material)
            data = gen_data(gt["law"], gt["r"], gt["noise"], gt["strain_range"],
                            cfg.seed + n, label=g)
            io.write_data_csv(data, out / f"data-{g}.csv")
        datasets[g] = data
        fits[g] = _stage("fit", segment_dp, data, cfg.k, cfg.mu)
        geom = _stage("geometry", build_geometry, fits[g], cfg.allow_nonpositive_slope,
                      cfg.strain_unit, g)
        spec = _stage("ptilde", ReliabilitySpec, cfg.epsilon, cfg.delta, data.r)
        p = _stage("ptilde", compute_ptilde, spec)
        uset = _stage("calibrate", calibrate_tau, data, geom, p, eps_bi=cfg.eps_bi)
        sets[g] = uset.with_tau(uset.tau, epsilon=cfg.epsilon, delta=cfg.delta)

    quad = {g: {"epsilon": cfg.epsilon, "delta": cfg.delta, "reliability": 1 - cfg.epsilon,
                "confidence": 1 - cfg.delta, "ptilde": s.ptilde, "tau": s.tau}
            for g, s in sets.items()}
    meta = {"config": cfg.to_dict(), "seed": cfg.seed, "versions": versions, "groups": quad,
            "assumptions": [io.IID_ASSUMPTION]}

    io.write_json(io.collection("fit", {g: io.fit_to_dict(f) for g, f in fits.items()}, meta),
                  out / "fit.json")
    io.write_json(io.collection("set", {g: io.set_to_dict(s) for g, s in sets.items()}, meta),
                  out / "set.json")

    boxes = _stage("bound", infer_boxes, system, sets)
    results = _stage("bound", sweep, system, sets, qoi, cfg.lambdas, boxes=boxes,
                     flat_m=cfg.flat_m, gap_tol=cfg.gap_tol, node_limit=cfg.node_limit)
    for lam, res in results:
        if isinstance(res, Exception):
            raise PipelineError("bound", res) from res

    refs = []
    ref_rows = []
    if cfg.reference:
        laws = {g: law_from_fit(s) for g, s in sets.items()}
        states = _stage("reference", solve_path, system, laws, [lam for lam, _ in results])
        refs = [qoi(st.u, st.sig) for st in states]
        ref_rows = [(st.lam, q, st.residual, st.iterations, st.regularized)
                    for st, q in zip(states, refs)]

    comments = [f"meta: {json.dumps(io.to_plain(meta), sort_keys=True)}", f"qoi: {qoi.label}"]
    rows = []
    contained = True
    for n, (lam, res) in enumerate(results):
        ref = refs[n] if refs else float("nan")
        inside = bool(res.contains(ref, tol=1e-9 * max(1.0, abs(ref)))) if refs else True
        contained &= inside
        rows.append((lam, res.q_lower, res.q_upper, res.width, res.gap_lower, res.gap_upper,
                     res.nodes[0], res.nodes[1], res.seconds, ref, inside))
    io.write_table(out / "bounds.csv",
                   ["lam", "q_lower", "q_upper", "width", "gap_lower", "gap_upper",
                    "nodes_lower", "nodes_upper", "seconds", "reference", "contained"],
                   rows, comments)
    if cfg.reference:
        io.write_table(out / "reference.csv",
                       ["lam", "q", "residual", "iterations", "regularized"], ref_rows,
                       comments + ["solver: damped Newton with Armijo backtracking, "
                                   "continuation from u = 0 (initial guess and damping are "
                                   "this package's choice)"])

    stamp = _timestamp() if cfg.timestamp else None
    lams = [lam for lam, _ in results]
    svg = bounds_svg(lams, [r.q_lower for _, r in results], [r.q_upper for _, r in results],
                     refs or None, qlabel=qoi.label, title=f"{model.name}: {qoi.label}",
                     timestamp=stamp)
    _write_svg(out / "bounds.svg", svg, meta)
    last = results[-1][1]
    groups = sorted(sets)
    for n, g in enumerate(groups):
        idx = [e for e, mem in enumerate(model.members) if mem.group == g]
        states = [(f"argmin lam={last.lam:g}", last.argmin_state.eps[idx],
                   last.argmin_state.sig[idx]),
                  (f"argmax lam={last.lam:g}", last.argmax_state.eps[idx],
                   last.argmax_state.sig[idx])]
        svg = scatter_svg(datasets[g], sets[g], title=f"{model.name}: {g}", states=states,
                          timestamp=stamp)
        if n == 0:
            _write_svg(out / "scatter.svg", svg, meta)
        if len(groups) > 1:
            _write_svg(out / f"scatter-{g}.svg", svg, meta)
    return RunResult(out, [], results, refs, sets, contained)


def _write_svg(path, svg: str, meta):
    tag = "<metadata>" + _xml_text(json.dumps(io.to_plain(meta), sort_keys=True)) + "</metadata>"
    lines = svg.split("\n")
    lines.insert(2, tag)
    path.write_text("\n".join(lines))


def _xml_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _timestamp() -> str:
    import datetime
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
