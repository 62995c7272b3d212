"""Command-line interface.

Exit codes: 0 ok, 1 usage error, 2 infeasible statistics (no p~), 3 solver
infeasible or failed, 4 geometry or model error, 5 I/O or data error,
6 reference outside the computed bounds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .boundprob import bound, build_bound_milp, infer_boxes, parse_qoi, sweep, tighten_boxes
from .datagen import gen_data, ground_truths
from .errors import DataError, SegboundError
from .milp import write_lp
from .orderstats import ReliabilitySpec, binomial_tail, compute_ptilde
from .pipeline import DEFAULT_QOI, RunConfig, resolve_model, run_pipeline
from .plotting import bounds_svg, scatter_svg
from .refsolver import law_from_fit, solve_path
from .segfit import export_misocp, segment_dp
from .structure import assemble, builtin_models, save_model
from .uncertainty import build_geometry, calibrate_tau, count_members, data_residuals

__all__ = ["main", "build_parser", "parse_grid"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved here
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text: str) -> list[float]:
    """``"a:b:n"`` (n evenly spaced values, ends included) or ``"v1,v2,..."``."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            if n == 1:
                return [float(a)]
            return [round(float(v), 12) for v in np.linspace(float(a), float(b), n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad load-factor grid {text!r} (use start:stop:count or a,b,c)") from None


def _range(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r} (use lo:hi)") from None
    return lo, hi


def _group_paths(extra: list[str], prefix: str) -> dict:
    """Collect ``--<prefix>-<group> PATH`` (or ``=PATH``) pairs from unparsed arguments."""
    out = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith(f"--{prefix}-"):
            raise UsageError(f"unrecognized argument {tok!r}")
        key = tok[len(prefix) + 3:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise UsageError(f"{tok} needs a path")
            val = extra[i + 1]
            i += 2
        out[key] = val
    return out


def _emit(doc, fmt="text"):
    if fmt == "json":
        print(json.dumps(io.to_plain(doc), indent=2, sort_keys=True))
    else:
        for k, v in doc.items():
            print(f"{k}: {v}")


# commands

def cmd_ptilde(args, extra):
    spec = ReliabilitySpec(args.epsilon, args.delta, args.r)
    p = compute_ptilde(spec)
    _emit({"ptilde": p, "tail": binomial_tail(spec.r, p, spec.epsilon),
           "reliability": 1 - spec.epsilon, "confidence": 1 - spec.delta}, args.format)


def cmd_fit(args, extra):
    data = io.read_data_csv(args.data)
    fit = segment_dp(data, args.k, args.mu)
    if args.export_model:
        # large enough that no row is cut off at the fitted solution
        res = [ln.alpha * data.strain + ln.beta * data.stress - ln.gamma for ln in fit.lines]
        big = args.big_m or 2.0 * max(float(np.max(r * r)) for r in res) + 1.0
        Path(args.export_model).write_text(export_misocp(data, args.k, args.mu, big))
    doc = io.fit_to_dict(fit, meta={"data": args.data, "versions": io.versions()})
    if args.out:
        io.write_json(doc, args.out)
    _emit({"segments": fit.k_used, "breaks": fit.breaks, "sq_error": fit.sq_error,
           "objective": fit.objective}, args.format)


def cmd_calibrate(args, extra):
    data = io.read_data_csv(args.data)
    fit = io.load_fit(args.fit)
    geom = build_geometry(fit, args.allow_nonpositive_slope, args.strain_unit,
                          label=args.label or Path(args.data).stem)
    p = compute_ptilde(ReliabilitySpec(args.epsilon, args.delta, data.r))
    uset = calibrate_tau(data, geom, p, tau_max=args.tau_max, eps_bi=args.eps_bi)
    uset = uset.with_tau(uset.tau, epsilon=args.epsilon, delta=args.delta)
    if args.out:
        io.write_json(io.set_to_dict(uset, meta={"data": args.data, "fit": args.fit,
                                                 "versions": io.versions(),
                                                 "assumptions": [io.IID_ASSUMPTION]}), args.out)
    _emit({"ptilde": p, "tau": uset.tau, "segments": uset.k,
           "members": count_members(data_residuals(data, uset), uset.tau)}, args.format)


def cmd_model(args, extra):
    if args.list:
        for name, mdl in builtin_models().items():
            print(f"{name}: {len(mdl.members)} members, dim {mdl.dim}")
        return
    if not args.check:
        raise UsageError("model: give --check MODEL or --list")
    mdl = resolve_model(args.check)
    sys_ = assemble(mdl)
    if args.export:
        save_model(mdl, args.export)
    _emit({"name": mdl.name, "m": sys_.m, "d": sys_.d, "L": list(sys_.L.shape),
           "N": list(sys_.N.shape), "groups": sorted(set(sys_.groups))}, args.format)


def _load_sets(args, extra, model):
    per = _group_paths(extra, "set")
    sets = {}
    if args.set:
        sets.update(io.load_groups(args.set, "set"))
    for g, path in per.items():
        sets[g] = io.load_set(path)
    groups = sorted({mem.group for mem in model.members})
    if len(sets) == 1 and len(groups) == 1:
        return {groups[0]: next(iter(sets.values()))}
    missing = [g for g in groups if g not in sets]
    if missing:
        raise DataError("no uncertainty set for group(s) " + ", ".join(missing)
                        + " (use --set FILE or --set-<group> FILE)")
    return sets


def _setup(args, extra):
    model = resolve_model(args.model)
    system = assemble(model)
    sets = _load_sets(args, extra, model)
    qtext = args.qoi or DEFAULT_QOI.get(model.name)
    if not qtext:
        raise UsageError("--qoi is required for this model")
    return model, system, sets, parse_qoi(qtext, model, system)


def _result_doc(res):
    return {"lambda": res.lam, "qoi": res.qoi, "q_lower": res.q_lower, "q_upper": res.q_upper,
            "gap_lower": res.gap_lower, "gap_upper": res.gap_upper,
            "nodes": list(res.nodes), "seconds": round(res.seconds, 3)}


def cmd_bound(args, extra):
    model, system, sets, qoi = _setup(args, extra)
    boxes = tighten_boxes(system, sets, args.lam, infer_boxes(system, sets))
    if args.write_lp:
        for sense in ("min", "max"):
            md = build_bound_milp(system, sets, qoi, args.lam, sense, boxes=boxes,
                                  flat_m=args.flat_m)
            write_lp(md, f"{args.write_lp}-{sense}.lp")
    res = bound(system, sets, qoi, args.lam, boxes=boxes, flat_m=args.flat_m,
                gap_tol=args.gap_tol, node_limit=args.node_limit)
    doc = _result_doc(res)
    if args.out:
        io.write_json(dict(doc, argmin_state=_state_doc(res.argmin_state),
                           argmax_state=_state_doc(res.argmax_state)), args.out)
    _emit(doc, args.format)


def _state_doc(st):
    return {"u": st.u, "eps": st.eps, "sig": st.sig, "regions": st.regions, "q": st.q}


def cmd_sweep(args, extra):
    model, system, sets, qoi = _setup(args, extra)
    lams = parse_grid(args.lambda_grid)
    results = sweep(system, sets, qoi, lams, flat_m=args.flat_m, gap_tol=args.gap_tol,
                    node_limit=args.node_limit)
    rows = []
    worst = 0
    print("lam,q_lower,q_upper,gap_lower,gap_upper,status")
    for lam, res in results:
        if isinstance(res, Exception):
            worst = worst or getattr(res, "exit_code", 1)
            rows.append((lam, float("nan"), float("nan"), float("nan"), float("nan"),
                         type(res).__name__))
        else:
            rows.append((lam, res.q_lower, res.q_upper, res.gap_lower, res.gap_upper, "ok"))
        print(",".join(io.cell(v) for v in rows[-1]))
    if args.out:
        io.write_table(args.out, ["lam", "q_lower", "q_upper", "gap_lower", "gap_upper",
                                  "status"], rows, [f"qoi: {qoi.label}"])
    if args.svg:
        Path(args.svg).write_text(bounds_svg([r[0] for r in rows], [r[1] for r in rows],
                                             [r[2] for r in rows], qlabel=qoi.label))
    return worst


def cmd_reference(args, extra):
    model = resolve_model(args.model)
    system = assemble(model)
    per = _group_paths(extra, "fit")
    fits = io.load_groups(args.fit, "fit") if args.fit else {}
    fits.update({g: io.load_fit(p) for g, p in per.items()})
    groups = sorted({mem.group for mem in model.members})
    if len(fits) == 1 and len(groups) == 1:
        fits = {groups[0]: next(iter(fits.values()))}
    missing = [g for g in groups if g not in fits]
    if missing:
        raise DataError("no fit for group(s) " + ", ".join(missing))
    laws = {g: law_from_fit(build_geometry(f, args.allow_nonpositive_slope, args.strain_unit))
            for g, f in fits.items()}
    qtext = args.qoi or DEFAULT_QOI.get(model.name)
    if not qtext:
        raise UsageError("--qoi is required for this model")
    qoi = parse_qoi(qtext, model, system)
    states = solve_path(system, laws, parse_grid(args.lambda_grid))
    rows = [(st.lam, qoi(st.u, st.sig), st.residual, st.iterations) for st in states]
    print("lam,q,residual,iterations")
    for row in rows:
        print(",".join(io.cell(v) for v in row))
    if args.out:
        io.write_table(args.out, ["lam", "q", "residual", "iterations"], rows,
                       [f"qoi: {qoi.label}"])


def cmd_gen_data(args, extra):
    table = ground_truths()
    if args.truth not in table:
        raise UsageError(f"unknown ground truth {args.truth!r}; choose from {sorted(table)}")
    gt = table[args.truth]
    r = args.r if args.r is not None else gt["r"]
    noise = args.noise if args.noise is not None else gt["noise"]
    rng = _range(args.range) if args.range else gt["strain_range"]
    data = gen_data(gt["law"], r, noise, rng, args.seed, label=args.truth)
    io.write_data_csv(data, args.out)
    _emit({"points": data.r, "seed": args.seed, "out": args.out}, args.format)


def cmd_pipeline(args, extra):
    if args.config:
        doc = io.read_json(args.config)
        cfg = RunConfig(**doc)
    else:
        cfg = RunConfig()
    for key in ("model", "epsilon", "delta", "k", "mu", "qoi", "seed", "flat_m"):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, key, v)
    if args.lambda_grid:
        cfg.lambdas = parse_grid(args.lambda_grid)
    if args.out:
        cfg.outdir = args.out
    if args.timestamp:
        cfg.timestamp = True
    cfg.data = dict(cfg.data, **_group_paths(extra, "data"))
    res = run_pipeline(cfg)
    print("lam,q_lower,q_upper,reference")
    for n, (lam, b) in enumerate(res.bounds):
        ref = res.reference[n] if res.reference else float("nan")
        print(",".join(io.cell(v) for v in (lam, b.q_lower, b.q_upper, ref)))
    print(f"artifacts in {res.outdir}: {', '.join(res.artifacts)}")


def cmd_plot(args, extra):
    if args.kind == "scatter":
        data = io.read_data_csv(args.data) if args.data else None
        uset = io.load_set(args.set) if args.set else None
        if data is None and uset is None:
            raise UsageError("plot scatter needs --data and/or --set")
        if data is None and uset.bbox is not None:
            from .plotting import Frame
            b = uset.bbox
            frame = Frame.around([b[0], b[1]], [b[2], b[3]])
            svg = scatter_svg(None, uset, title=args.title, frame=frame)
        else:
            svg = scatter_svg(data, uset, title=args.title)
    else:
        if not args.bounds:
            raise UsageError("plot bounds needs --bounds bounds.csv")
        _, rows = io.read_table(args.bounds)
        lams = [float(r["lam"]) for r in rows]
        lo = [float(r["q_lower"]) for r in rows]
        hi = [float(r["q_upper"]) for r in rows]
        ref = [float(r["reference"]) for r in rows] if rows and "reference" in rows[0] else None
        svg = bounds_svg(lams, lo, hi, ref, title=args.title)
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")


# parser

def _common_bound(p):
    p.add_argument("--model", required=True, help="built-in name or structure JSON")
    p.add_argument("--set", help="uncertainty set (single or per-group bundle); "
                                 "per-group files via --set-<group> FILE")
    p.add_argument("--qoi", help='e.g. "uy:node=r3c4", "uz:node=T1", "sigma:member=7"')
    p.add_argument("--flat-m", type=float, default=None,
                   help="use one constant M for every relaxed row instead of derived values")
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.add_argument("--node-limit", type=int, default=200_000)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="segbound", description="Data-driven bounds on truss responses.")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ptilde", help="minimum in-set count for (epsilon, delta, r)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_ptilde)

    p = sub.add_parser("fit", help="segmented least squares")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--out", help="fit JSON")
    p.add_argument("--export-model", help="write the equivalent conic model as text")
    p.add_argument("--big-m", type=float, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("calibrate", help="band half-width from data")
    p.add_argument("--fit", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps-bi", type=float, default=1e-7)
    p.add_argument("--tau-max", type=float, default=None)
    p.add_argument("--strain-unit", type=float, default=1e-3)
    p.add_argument("--allow-nonpositive-slope", action="store_true")
    p.add_argument("--label", default=None)
    p.add_argument("--out", help="set JSON")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("model", help="check or list structures")
    p.add_argument("--check", help="built-in name or structure JSON")
    p.add_argument("--export", help="write the structure as JSON")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("bound", help="bounds at one load factor")
    _common_bound(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out", help="result JSON with both extreme states")
    p.add_argument("--write-lp", help="also write PREFIX-min.lp and PREFIX-max.lp")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="bounds over a load-factor grid")
    _common_bound(p)
    p.add_argument("--lambda-grid", required=True, help="start:stop:count or a,b,c")
    p.add_argument("--out", help="CSV")
    p.add_argument("--svg", help="bounds plot")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reference", help="equilibrium path under the fitted law")
    p.add_argument("--model", required=True)
    p.add_argument("--fit", help="fit (single or per-group bundle); per group via --fit-<group>")
    p.add_argument("--qoi")
    p.add_argument("--lambda-grid", required=True)
    p.add_argument("--strain-unit", type=float, default=1e-3)
    p.add_argument("--allow-nonpositive-slope", action="store_true")
    p.add_argument("--out", help="CSV")
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("gen-data", help="synthetic data from a built-in ground truth")
    p.add_argument("--truth", default="tri-modulus")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--noise", type=float, default=None, help="stress noise std (MPa)")
    p.add_argument("--range", default=None, help="strain range lo:hi")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("pipeline", help="data -> fit -> set -> bounds -> reference -> plots")
    p.add_argument("--config", help="RunConfig as JSON")
    p.add_argument("--model", default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--qoi", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--flat-m", type=float, default=None)
    p.add_argument("--lambda-grid", default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--timestamp", action="store_true", help="stamp SVG files")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("plot", help="SVG plots from artifacts")
    p.add_argument("kind", choices=("scatter", "bounds"))
    p.add_argument("--data")
    p.add_argument("--set")
    p.add_argument("--bounds")
    p.add_argument("--title", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return ap


_EXTRA_OK = {"bound": "set", "sweep": "set", "reference": "fit", "pipeline": "data"}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra and args.command not in _EXTRA_OK:
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        code = args.func(args, extra)
        return int(code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SegboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 1)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
