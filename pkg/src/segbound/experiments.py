"""Experiment set-ups shared by scripts/ and the acceptance tests.

``prepare`` turns a built-in model plus seeded synthetic data into
calibrated per-group sets; the other helpers run the studies on top.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .boundprob import BoundResult, QuantityOfInterest, bound, infer_boxes, parse_qoi
from .datagen import gen_data, ground_truth
from .orderstats import ReliabilitySpec, compute_ptilde
from .refsolver import law_from_fit, solve_path
from .segfit import segment_dp
from .structure import AssembledSystem, StructuralModel, assemble, builtin_models
from .uncertainty import build_geometry, calibrate_tau

__all__ = ["Setup", "prepare", "recalibrate", "ContainmentRow", "containment", "WidthRow",
           "width_study", "tri_modulus_segment_counts", "LAMBDAS"]

LAMBDAS = [round(0.1 * i, 10) for i in range(1, 11)]


@dataclass
class Setup:
    model: StructuralModel
    system: AssembledSystem
    qoi: QuantityOfInterest
    data: dict          # group -> MaterialDataSet
    fits: dict          # group -> SegmentedFit
    sets: dict          # group -> UncertaintySet
    epsilon: float = 0.1
    delta: float = 0.1
    seed: int = 0
    strain_unit: float = 1e-3
    k: int = 5
    mu: float = 2.0


def prepare(model: str = "truss-3x2", qoi: str = "uy:node=r3c4", seed: int = 0,
            epsilon: float = 0.1, delta: float = 0.1, k: int = 5, mu: float = 2.0,
            strain_unit: float = 1e-3, data: dict | None = None) -> Setup:
    """Fit and calibrate one set per member group.

    Without ``data`` each group's material ground truth is sampled, group n
    (sorted by name) with seed ``seed + n``.
    """
    mdl = builtin_models()[model]
    sys_ = assemble(mdl)
    groups = sorted({mem.group for mem in mdl.members})
    datasets, fits = {}, {}
    for n, g in enumerate(groups):
        if data and g in data:
            d = data[g]
        else:
            gt = ground_truth(mdl.groups.get(g, g))
            d = gen_data(gt["law"], gt["r"], gt["noise"], gt["strain_range"], seed + n, label=g)
        datasets[g] = d
        fits[g] = segment_dp(d, k, mu)
    su = Setup(mdl, sys_, parse_qoi(qoi, mdl, sys_), datasets, fits, {}, epsilon, delta, seed,
               strain_unit, k, mu)
    return recalibrate(su, epsilon, delta)


def recalibrate(su: Setup, epsilon: float, delta: float) -> Setup:
    """Same data and fits, sets calibrated for another (epsilon, delta)."""
    sets = {}
    for g, d in su.data.items():
        geom = build_geometry(su.fits[g], strain_unit=su.strain_unit, label=g)
        p = compute_ptilde(ReliabilitySpec(epsilon, delta, d.r))
        u = calibrate_tau(d, geom, p)
        sets[g] = u.with_tau(u.tau, epsilon=epsilon, delta=delta)
    return Setup(su.model, su.system, su.qoi, su.data, su.fits, sets, epsilon, delta, su.seed,
                 su.strain_unit, su.k, su.mu)


@dataclass
class ContainmentRow:
    lam: float
    q_lower: float
    q_ref: float
    q_upper: float
    seconds: float
    nodes: tuple = (0, 0)

    @property
    def inside(self) -> bool:
        tol = 1e-9 * max(1.0, abs(self.q_ref))
        return self.q_lower - tol <= self.q_ref <= self.q_upper + tol


def containment(su: Setup, lams=LAMBDAS, **kw) -> list[ContainmentRow]:
    """Bounds and the reference solution at each load factor."""
    laws = {g: law_from_fit(s) for g, s in su.sets.items()}
    refs = solve_path(su.system, laws, lams)
    boxes = infer_boxes(su.system, su.sets)
    rows = []
    for lam, ref in zip(lams, refs):
        t0 = time.perf_counter()
        res = bound(su.system, su.sets, su.qoi, lam, boxes=boxes, **kw)
        rows.append(ContainmentRow(lam, res.q_lower, su.qoi(ref.u, ref.sig), res.q_upper,
                                   time.perf_counter() - t0, res.nodes))
    return rows


@dataclass
class WidthRow:
    epsilon: float
    delta: float
    ptilde: int
    tau: float
    result: BoundResult = field(repr=False)

    @property
    def width(self) -> float:
        return self.result.width


def width_study(su: Setup, pairs, lam: float = 1.0, cache: dict | None = None, **kw):
    """Interval width at ``lam`` for each (epsilon, delta); one group's p~ and tau reported.

    ``cache`` maps (epsilon, delta) to rows already computed.
    """
    cache = {} if cache is None else cache
    out = []
    for eps, delta in pairs:
        key = (float(eps), float(delta))
        if key not in cache:
            s2 = recalibrate(su, eps, delta)
            g = sorted(s2.sets)[0]
            res = bound(s2.system, s2.sets, s2.qoi, lam, **kw)
            cache[key] = WidthRow(eps, delta, s2.sets[g].ptilde, s2.sets[g].tau, res)
        out.append(cache[key])
    return out


def tri_modulus_segment_counts(seeds=range(10), k: int = 5, mu: float = 2.0) -> list[int]:
    gt = ground_truth("tri-modulus")
    return [segment_dp(gen_data(gt["law"], gt["r"], gt["noise"], gt["strain_range"], s),
                       k, mu).k_used for s in seeds]

