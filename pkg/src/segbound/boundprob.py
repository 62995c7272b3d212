"""Worst-case bounds of a linear response over all states whose member
(strain, stress) pairs lie in the calibrated bands.

For each member ``e`` with a k-region band the encoding uses binaries
``s_1 >= ... >= s_{k-1}``; the selected region is ``1 + sum(s)``. Region
``i`` is selected exactly when ``s_{i-1} = 1`` and ``s_i = 0`` (with
``s_0 = 1``, ``s_k = 0``), so ``P_i = (1 - s_{i-1}) + s_i`` is 0 for the
selected region and at least 1 for every other one. Each region's rows
are relaxed by ``M * P_i``:

    p_{i-1} eps + q_{i-1} sig >= r_{i-1} - M P_i     (i >= 2)
    p_i eps + q_i sig         <= r_i + M P_i         (i <= k-1)
    |alpha_i eps + beta_i sig - gamma_i| <= tau + M P_i

Every ``M`` is the row's largest violation over the variable box, times
1.05, so relaxed rows never cut off a point of the box.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, SegboundError, SolverInfeasible, UnboundedBox
from .milp import LpSession, MilpModel, solve_lp, solve_milp
from .structure import AssembledSystem, StructuralModel
from .uncertainty import UncertaintySet, hull_inequalities, member_region

__all__ = [
    "QuantityOfInterest",
    "Boxes",
    "BoundMilp",
    "BoundResult",
    "State",
    "parse_qoi",
    "infer_boxes",
    "tighten_boxes",
    "build_bound_milp",
    "bound",
    "sweep",
    "verify_state",
]

M_FACTOR = 1.05
BOX_INFLATE = 2.0
MEMBERSHIP_TOL = 1e-6
RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class QuantityOfInterest:
    """``q = cu @ u + csig @ sigma``."""

    cu: np.ndarray
    csig: np.ndarray
    label: str = "q"
    kind: str = "linear"

    def __call__(self, u, sig) -> float:
        return float(self.cu @ np.asarray(u) + self.csig @ np.asarray(sig))

    @classmethod
    def displacement(cls, system: AssembledSystem, node: int, comp: int, label=""):
        j = system.dof_index(node, comp)
        if j is None:
            raise DataError(f"dof ({node}, {'xyz'[comp]}) is supported, not free")
        cu = np.zeros(system.d)
        cu[j] = 1.0
        return cls(cu, np.zeros(system.m), label or f"u{'xyz'[comp]}[{node}]", "displacement")

    @classmethod
    def stress(cls, system: AssembledSystem, member: int, label=""):
        if not 0 <= member < system.m:
            raise DataError(f"member index {member} out of range")
        cs = np.zeros(system.m)
        cs[member] = 1.0
        return cls(np.zeros(system.d), cs, label or f"sigma[{member + 1}]", "stress")


_QOI_RE = re.compile(r"^\s*(u[xyz]|sigma)\s*:\s*(node|member)\s*=\s*(\S+)\s*$")


def parse_qoi(text: str, model: StructuralModel, system: AssembledSystem) -> QuantityOfInterest:
    """Parse ``"uy:node=r3c4"``, ``"uz:node=T1"`` or ``"sigma:member=7"``."""
    m = _QOI_RE.match(text)
    if not m:
        raise DataError(f"cannot parse quantity of interest {text!r}")
    what, key, ident = m.groups()
    if what == "sigma":
        if key != "member":
            raise DataError("stress quantities need member=<id>")
        ids = [mem.id for mem in model.members]
        if ident not in ids:
            raise DataError(f"unknown member id {ident!r}")
        return QuantityOfInterest.stress(system, ids.index(ident), label=text.strip())
    if key != "node":
        raise DataError("displacement quantities need node=<id>")
    comp = "xyz".index(what[1])
    if comp >= model.dim:
        raise DataError(f"component {what[1]} does not exist in a {model.dim}-d model")
    return QuantityOfInterest.displacement(system, model.node_index(ident), comp,
                                           label=text.strip())


@dataclass(frozen=True)
class Boxes:
    u_lo: np.ndarray
    u_hi: np.ndarray
    eps_lo: np.ndarray
    eps_hi: np.ndarray
    sig_lo: np.ndarray
    sig_hi: np.ndarray
    regions: tuple | None = None   # per member, regions that meet the box
    lam: float | None = None       # load factor the boxes were tightened for
    base: Boxes | None = None      # the inferred boxes these were tightened from

    def member(self, e):
        return (self.eps_lo[e], self.eps_hi[e], self.sig_lo[e], self.sig_hi[e])


def _sets_per_member(system, sets) -> list[UncertaintySet]:
    if isinstance(sets, UncertaintySet):
        return [sets] * system.m
    out = []
    for g in system.groups:
        if g not in sets:
            raise DataError(f"no calibrated set for member group {g!r}")
        out.append(sets[g])
    return out


def _member_box(uset: UncertaintySet):
    if uset.bbox is None:
        raise UnboundedBox(f"set {uset.label!r} carries no data bounding box")
    e0, e1, s0, s1 = uset.bbox
    ce, he = 0.5 * (e0 + e1), 0.5 * (e1 - e0)
    cs, hs = 0.5 * (s0 + s1), 0.5 * (s1 - s0)
    me = BOX_INFLATE * he + uset.tau * uset.strain_unit
    ms = BOX_INFLATE * hs + uset.tau
    if not (me > 0 and ms > 0):
        raise UnboundedBox(f"set {uset.label!r} has a degenerate data bounding box")
    return ce - me, ce + me, cs - ms, cs + ms


def _u_range(system, eps_lo, eps_hi, box_lo, box_hi):
    d = system.d
    lo = np.empty(d)
    hi = np.empty(d)
    base = MilpModel(name="u-box")
    for j in range(d):
        base.add_var(f"u{j}", box_lo[j], box_hi[j])
    for e in range(system.m):
        # eps_lo <= L u + eps0 <= eps_hi
        row = {j: system.L[e, j] for j in np.flatnonzero(system.L[e])}
        base.add_row(row, ">=", eps_lo[e] - system.eps0[e])
        base.add_row(row, "<=", eps_hi[e] - system.eps0[e])
    for j in range(d):
        for sense in ("min", "max"):
            base.set_objective({j: 1.0}, sense)
            res = solve_lp(base)
            if res.status != "optimal":
                raise UnboundedBox("the strain box admits no compatible displacement")
            (lo if sense == "min" else hi)[j] = res.x[j]
    return lo, hi


def infer_boxes(system: AssembledSystem, sets) -> Boxes:
    """Variable boxes: (eps, sigma) from each group's data, u from per-dof LPs.

    The u box is implied by compatibility and the strain box, so it never
    restricts the problem; it only bounds the column scaling.
    """
    per = _sets_per_member(system, sets)
    mb = np.array([_member_box(s) for s in per])
    eps_lo, eps_hi, sig_lo, sig_hi = mb.T
    if np.linalg.matrix_rank(system.L) < system.d:
        raise UnboundedBox("compatibility matrix is rank deficient (mechanism)")
    # generous first box, then a second pass on a tight box for accuracy
    span = float(np.max(eps_hi - eps_lo)) * float(system.lengths.sum())
    big = np.full(system.d, 1e3 * span + 1.0)
    lo, hi = _u_range(system, eps_lo, eps_hi, -big, big)
    if np.any(np.abs(lo) >= 0.999 * big) or np.any(np.abs(hi) >= 0.999 * big):
        raise UnboundedBox("displacement box is not implied by the strain box")
    width = np.maximum(hi - lo, 1e-9 * span + 1e-12)
    lo, hi = _u_range(system, eps_lo, eps_hi, lo - 0.1 * width, hi + 0.1 * width)
    pad = 1e-3 * np.maximum(hi - lo, 1e-9 * span + 1e-12)
    return Boxes(lo - pad, hi + pad, eps_lo, eps_hi, sig_lo, sig_hi)


def _hull_rows(md, e, facets, ie, isg):
    for j, (ae, asg, b) in enumerate(facets):
        md.add_row({ie: ae, isg: asg}, "<=", b + 1e-9 * (1.0 + abs(b)), name=f"hull{e + 1}_{j + 1}")


def tighten_boxes(system: AssembledSystem, sets, lam: float, boxes: Boxes | None = None,
                  rounds: int = 12, min_gain: float = 0.01) -> Boxes:
    """Shrink each member's (eps, sigma) box to what the load factor permits.

    Each round minimizes and maximizes every member strain and stress over
    compatibility, equilibrium, and the convex hull of each member's band
    inside its current box. The feasible states are unchanged; only the
    boxes, and with them the big-M constants, get smaller. Regions whose
    piece of the band misses the final box are recorded as excluded.
    """
    per = _sets_per_member(system, sets)
    boxes = boxes or infer_boxes(system, sets)
    base = boxes.base or boxes
    # pads are fixed fractions of the inferred widths, so widths never collapse to 0
    pads = (1e-6 * (base.eps_hi - base.eps_lo), 1e-6 * (base.sig_hi - base.sig_lo))
    m, d = system.m, system.d
    lo_e, hi_e = boxes.eps_lo.copy(), boxes.eps_hi.copy()
    lo_s, hi_s = boxes.sig_lo.copy(), boxes.sig_hi.copy()
    f = lam * system.f_base
    for _ in range(rounds):
        md = MilpModel(name="tighten")
        iu = [md.add_var(f"u{j}", boxes.u_lo[j], boxes.u_hi[j]) for j in range(d)]
        ie = [md.add_var(f"e{e}", lo_e[e], hi_e[e]) for e in range(m)]
        isg = [md.add_var(f"s{e}", lo_s[e], hi_s[e]) for e in range(m)]
        for e in range(m):
            row = {ie[e]: 1.0}
            for j in np.flatnonzero(system.L[e]):
                row[iu[j]] = -system.L[e, j]
            md.add_row(row, "=", system.eps0[e])
        for j in range(d):
            md.add_row({isg[e]: system.N[j, e] for e in np.flatnonzero(system.N[j])}, "=", f[j])
        for e in range(m):
            facets, alive = hull_inequalities(per[e], (lo_e[e], hi_e[e], lo_s[e], hi_s[e]))
            if not alive:
                raise SolverInfeasible(f"member {e + 1} has no admissible (strain, stress) "
                                       f"at load factor {lam:g}")
            _hull_rows(md, e, facets, ie[e], isg[e])
        sess = LpSession(md)
        if not sess.feasible:
            raise SolverInfeasible(f"no compatible, equilibrated state within the bands' hull "
                                   f"at load factor {lam:g}")
        old = (hi_e - lo_e, hi_s - lo_s)
        # extremes seen in any LP solution so far; a bound already reached
        # by a feasible point cannot move, so its LP is skipped
        seen_lo = np.full(md.n, np.inf)
        seen_hi = np.full(md.n, -np.inf)
        for e in range(m):
            for arr_lo, arr_hi, idx, pw in ((lo_e, hi_e, ie, pads[0]), (lo_s, hi_s, isg, pads[1])):
                j = idx[e]
                pad = pw[e]
                for sense in ("min", "max"):
                    if sense == "min" and seen_lo[j] <= arr_lo[e] + pad:
                        continue
                    if sense == "max" and seen_hi[j] >= arr_hi[e] - pad:
                        continue
                    v, x = sess.optimize({j: 1.0}, sense)
                    np.minimum(seen_lo, x, out=seen_lo)
                    np.maximum(seen_hi, x, out=seen_hi)
                    if sense == "min":
                        arr_lo[e] = max(arr_lo[e], v - pad)
                    else:
                        arr_hi[e] = min(arr_hi[e], v + pad)
        gain = max(float(np.max(1 - (hi_e - lo_e) / old[0])),
                   float(np.max(1 - (hi_s - lo_s) / old[1])))
        if gain < min_gain:
            break
    regions = tuple(tuple(hull_inequalities(per[e], (lo_e[e], hi_e[e], lo_s[e], hi_s[e]))[1])
                    for e in range(m))
    if any(not r for r in regions):
        raise SolverInfeasible(f"a member has no admissible region at load factor {lam:g}")
    return Boxes(boxes.u_lo, boxes.u_hi, lo_e, hi_e, lo_s, hi_s, regions, float(lam), base)


@dataclass
class BoundMilp(MilpModel):
    """Bound problem model plus the variable layout needed to read states back."""

    u_idx: list = field(default_factory=list)
    eps_idx: list = field(default_factory=list)
    sig_idx: list = field(default_factory=list)
    s_idx: list = field(default_factory=list)      # per member, list of k-1 indices
    relaxed: list = field(default_factory=list)    # Relaxed entries
    boxes: Boxes | None = None
    lam: float = 0.0


@dataclass(frozen=True)
class Relaxed:
    """A big-M row before relaxation: ``ce*eps + cs*sig (sense) rhs``."""

    row: int
    member: int
    region: int
    big_m: float
    ce: float
    cs: float
    sense: str
    rhs: float


def _row_max(coef_e, coef_s, const, e_lo, e_hi, s_lo, s_hi):
    """max over the box of coef_e*eps + coef_s*sig - const."""
    return (max(coef_e * e_lo, coef_e * e_hi) + max(coef_s * s_lo, coef_s * s_hi) - const)


def build_bound_milp(system: AssembledSystem, sets, qoi: QuantityOfInterest, lam: float,
                     sense: str = "min", boxes: Boxes | None = None,
                     flat_m: float | None = None, hull_rows: bool = True) -> BoundMilp:
    """Mixed-binary model of min/max q over compatible, equilibrated, in-band states.

    If ``boxes`` records excluded regions, the staircase binaries that
    would select them are fixed. ``hull_rows`` adds, per member, the facets
    of the convex hull of its band inside its box (valid inequalities).
    """
    per = _sets_per_member(system, sets)
    boxes = boxes or infer_boxes(system, sets)
    if boxes.lam is not None and boxes.lam != lam:
        raise ValueError(f"boxes were tightened for load factor {boxes.lam:g}, not {lam:g}")
    md = BoundMilp(name=f"bound-{sense}-{qoi.label}", boxes=boxes, lam=float(lam))
    d, m = system.d, system.m
    md.u_idx = [md.add_var(f"u{j + 1}", boxes.u_lo[j], boxes.u_hi[j]) for j in range(d)]
    md.eps_idx = [md.add_var(f"eps{e + 1}", boxes.eps_lo[e], boxes.eps_hi[e]) for e in range(m)]
    md.sig_idx = [md.add_var(f"sig{e + 1}", boxes.sig_lo[e], boxes.sig_hi[e]) for e in range(m)]
    for e in range(m):
        k = per[e].k
        md.s_idx.append([md.add_var(f"s{e + 1}_{i}", binary=True) for i in range(1, k)])
    for e in range(m):
        row = {md.eps_idx[e]: 1.0}
        for j in np.flatnonzero(system.L[e]):
            row[md.u_idx[j]] = -system.L[e, j]
        md.add_row(row, "=", system.eps0[e], name=f"compat{e + 1}")
    f = lam * system.f_base
    for j in range(d):
        row = {md.sig_idx[e]: system.N[j, e] for e in np.flatnonzero(system.N[j])}
        md.add_row(row, "=", f[j], name=f"equil{j + 1}")
    for e in range(m):
        _member_rows(md, e, per[e], flat_m)
        if boxes.regions is not None:
            alive = boxes.regions[e]
            for j, idx in enumerate(md.s_idx[e], start=1):
                if j < min(alive):
                    md.fix(idx, 1.0)
                elif j >= max(alive):
                    md.fix(idx, 0.0)
        if hull_rows:
            facets, _ = hull_inequalities(per[e], boxes.member(e))
            _hull_rows(md, e, facets, md.eps_idx[e], md.sig_idx[e])
    obj = {md.u_idx[j]: c for j, c in enumerate(qoi.cu) if c}
    for e, c in enumerate(qoi.csig):
        if c:
            obj[md.sig_idx[e]] = obj.get(md.sig_idx[e], 0.0) + c
    md.set_objective(obj, sense)
    return md


def _member_rows(md: BoundMilp, e: int, uset: UncertaintySet, flat_m):
    k = uset.k
    lines = uset.raw_lines()
    seps = uset.raw_seps()
    s = md.s_idx[e]
    ie, isg = md.eps_idx[e], md.sig_idx[e]
    b = md.boxes
    box = (b.eps_lo[e], b.eps_hi[e], b.sig_lo[e], b.sig_hi[e])
    for i in range(1, k - 1):
        md.add_row({s[i - 1]: 1.0, s[i]: -1.0}, ">=", 0.0, name=f"stair{e + 1}_{i}")

    def add_relaxed(ce, cs, sense, rhs, region, name):
        viol = _row_max(ce, cs, rhs, *box) if sense == "<=" else _row_max(-ce, -cs, -rhs, *box)
        big = M_FACTOR * max(viol, 0.0) if flat_m is None else float(flat_m)
        # g <= rhs + M P  or  g >= rhs - M P,  P = (1 - s_{i-1}) + s_i
        sgn = 1.0 if sense == "<=" else -1.0
        rhs0 = rhs
        row = {ie: ce, isg: cs}
        if region <= k - 1:
            row[s[region - 1]] = -sgn * big
        if region >= 2:
            row[s[region - 2]] = sgn * big
            rhs = rhs + sgn * big
        r = md.add_row(row, sense, rhs, name=name)
        md.relaxed.append(Relaxed(r, e, region, big, ce, cs, sense, rhs0))

    for i in range(1, k + 1):
        a, bt, g = lines[i - 1]
        if i >= 2:
            p, q, rr = seps[i - 1]
            add_relaxed(p, q, ">=", rr, i, f"sepL{e + 1}_{i}")
        if i <= k - 1:
            p, q, rr = seps[i]
            add_relaxed(p, q, "<=", rr, i, f"sepU{e + 1}_{i}")
        add_relaxed(a, bt, "<=", g + uset.tau, i, f"resU{e + 1}_{i}")
        add_relaxed(a, bt, ">=", g - uset.tau, i, f"resL{e + 1}_{i}")


@dataclass
class State:
    """Full assignment read back from a bound model; ``regions`` are 1-based."""

    u: np.ndarray
    eps: np.ndarray
    sig: np.ndarray
    s: list
    regions: np.ndarray
    q: float


@dataclass
class Verification:
    compat: float          # max |eps - L u - eps0| relative to the strain box magnitude
    equil: float           # max |N sig - lam f| relative to |N| |sigma|max + |lam f|
    membership: bool
    outside: list          # members whose (eps, sig) is not in their band
    bigm_valid: bool
    box_active: dict

    @property
    def ok(self) -> bool:
        return (self.compat <= RESIDUAL_TOL and self.equil <= RESIDUAL_TOL
                and self.membership and self.bigm_valid)


@dataclass
class BoundResult:
    lam: float
    qoi: str
    q_lower: float
    q_upper: float
    argmin_state: State
    argmax_state: State
    gap_lower: float
    gap_upper: float
    bound_lower: float
    bound_upper: float
    nodes: tuple = (0, 0)
    seconds: float = 0.0
    verification: tuple = ()

    @property
    def width(self) -> float:
        return self.q_upper - self.q_lower

    def contains(self, q, tol=0.0) -> bool:
        return self.q_lower - tol <= q <= self.q_upper + tol

    @property
    def box_active(self) -> dict:
        out = {}
        for v in self.verification:
            for key, flag in v.box_active.items():
                out[key] = out.get(key, False) or flag
        return out


def read_state(md: BoundMilp, x, qoi: QuantityOfInterest) -> State:
    u = np.asarray(x)[md.u_idx]
    eps = np.asarray(x)[md.eps_idx]
    sig = np.asarray(x)[md.sig_idx]
    s = [np.round(np.asarray(x)[idx]).astype(int) for idx in md.s_idx]
    regions = np.array([1 + int(v.sum()) for v in s])
    return State(u, eps, sig, s, regions, qoi(u, sig))


def verify_state(system: AssembledSystem, sets, state: State, lam: float,
                 md: BoundMilp | None = None, tol: float = MEMBERSHIP_TOL) -> Verification:
    """Substitute a state into the governing relations, independently of the model rows.

    Membership is decided by the uncertainty module. When the model is
    given, every relaxed row's big-M is also checked against the row's
    largest violation over the box, and box-active flags are reported.
    """
    per = _sets_per_member(system, sets)
    boxes = md.boxes if md is not None else infer_boxes(system, sets)
    base = boxes.base or boxes
    emag = np.maximum(np.abs(base.eps_lo), np.abs(base.eps_hi))
    smag = np.maximum(np.abs(base.sig_lo), np.abs(base.sig_hi))
    compat = float(np.max(np.abs(state.eps - system.L @ state.u - system.eps0) / emag))
    scale = np.abs(system.N) @ smag + np.abs(lam * system.f_base)
    resid = np.abs(system.N @ state.sig - lam * system.f_base)
    equil = float(np.max(resid / np.maximum(scale, 1e-300), initial=0.0))
    outside = [e for e in range(system.m)
               if member_region((state.eps[e], state.sig[e]), per[e], tol) is None]
    bigm_ok = True
    if md is not None:
        for rx in md.relaxed:
            e = rx.member
            box = (boxes.eps_lo[e], boxes.eps_hi[e], boxes.sig_lo[e], boxes.sig_hi[e])
            if rx.sense == "<=":
                viol = _row_max(rx.ce, rx.cs, rx.rhs, *box)
            else:
                viol = _row_max(-rx.ce, -rx.cs, -rx.rhs, *box)
            if viol > rx.big_m * (1 + 1e-12) + 1e-12:
                bigm_ok = False

    # tightened boxes are implied by the data boxes, so activity is judged on the latter
    def _touch(v, lo, hi, rel=1e-7):
        w = hi - lo
        return bool(np.any(v <= lo + rel * w) | np.any(v >= hi - rel * w))

    active = {"u": _touch(state.u, base.u_lo, base.u_hi),
              "eps": _touch(state.eps, base.eps_lo, base.eps_hi),
              "sig": _touch(state.sig, base.sig_lo, base.sig_hi)}
    return Verification(compat, equil, not outside, outside, bigm_ok, active)


def _solve_side(system, sets, qoi, lam, sense, boxes, flat_m, hull_rows, gap_tol, node_limit):
    md = build_bound_milp(system, sets, qoi, lam, sense, boxes=boxes, flat_m=flat_m,
                          hull_rows=hull_rows)
    try:
        sol = solve_milp(md, gap_tol=gap_tol, node_limit=node_limit)
    except SolverInfeasible as exc:
        raise SolverInfeasible(
            f"no state at load factor {lam:g} is compatible, in equilibrium and in the "
            f"bands ({exc})") from exc
    state = read_state(md, sol.values, qoi)
    return md, sol, state


def bound(system: AssembledSystem, sets, qoi: QuantityOfInterest, lam: float,
          boxes: Boxes | None = None, tighten: bool = True, hull_rows: bool = True,
          flat_m: float | None = None, gap_tol: float = 1e-6, node_limit: int = 200_000,
          verify: bool = True) -> BoundResult:
    """Certified [q_lower, q_upper] at load factor ``lam``.

    Boxes start from the data (``infer_boxes``) and, with ``tighten``, are
    shrunk for this load factor first. Both returned states are
    re-verified by substitution; a failed check raises SegboundError. With
    ``flat_m`` the big-M check is reported but not enforced, since a flat
    constant carries no validity guarantee.
    """
    boxes = boxes or infer_boxes(system, sets)
    if tighten and boxes.lam != lam:
        boxes = tighten_boxes(system, sets, lam, boxes)
    md_lo, sol_lo, st_lo = _solve_side(system, sets, qoi, lam, "min", boxes, flat_m, hull_rows,
                                       gap_tol, node_limit)
    md_hi, sol_hi, st_hi = _solve_side(system, sets, qoi, lam, "max", boxes, flat_m, hull_rows,
                                       gap_tol, node_limit)
    checks = ()
    if verify:
        checks = (verify_state(system, sets, st_lo, lam, md_lo),
                  verify_state(system, sets, st_hi, lam, md_hi))
        for side, v in zip(("min", "max"), checks):
            ok = v.ok if flat_m is None else (v.compat <= RESIDUAL_TOL
                                             and v.equil <= RESIDUAL_TOL and v.membership)
            if not ok:
                raise SegboundError(
                    f"{side} state failed verification at lambda={lam:g}: compat={v.compat:.2e} "
                    f"equil={v.equil:.2e} outside={v.outside} bigM valid={v.bigm_valid}")
    if sol_lo.objective > sol_hi.objective + 1e-9 * max(1.0, abs(sol_hi.objective)):
        raise SegboundError("lower bound exceeds upper bound")
    return BoundResult(lam=float(lam), qoi=qoi.label, q_lower=float(sol_lo.objective),
                       q_upper=float(sol_hi.objective), argmin_state=st_lo, argmax_state=st_hi,
                       gap_lower=float(sol_lo.gap), gap_upper=float(sol_hi.gap),
                       bound_lower=float(sol_lo.bound), bound_upper=float(sol_hi.bound),
                       nodes=(sol_lo.nodes, sol_hi.nodes),
                       seconds=sol_lo.seconds + sol_hi.seconds, verification=checks)


def sweep(system: AssembledSystem, sets, qoi: QuantityOfInterest, lams, **kwargs) -> list:
    """``[(lam, BoundResult or the exception raised)]`` ordered by lam."""
    lams = sorted(float(v) for v in lams)
    if not lams:
        raise ValueError("empty load-factor grid")
    boxes = kwargs.pop("boxes", None) or infer_boxes(system, sets)
    out = []
    for lam in lams:
        try:
            out.append((lam, bound(system, sets, qoi, lam, boxes=boxes, **kwargs)))
        except SegboundError as exc:
            out.append((lam, exc))
    return out
