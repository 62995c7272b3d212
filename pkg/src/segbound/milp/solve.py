"""LP relaxation driver and best-bound branch-and-bound."""

from __future__ import annotations

import heapq
import time

import numpy as np

from ..errors import NodeLimit, NumericalFailure, SolverInfeasible
from .model import LpResult, MilpModel, MilpSolution
from .simplex import FEAS_TOL, OPT_TOL, SimplexEngine

__all__ = ["solve_lp", "solve_milp", "ScaledProblem", "LpSession"]

PHASE1_TOL = 1e-7


class ScaledProblem:
    """``x = lb + w*y`` with ``y`` in [0, 1] (or [0, 0] for fixed variables),
    rows equilibrated to unit max-coefficient, slack per row.

    The objective is in minimization form, divided by its largest coefficient.
    """

    def __init__(self, model: MilpModel):
        c, A, senses, b, lb, ub, binary = model.arrays()
        self.model = model
        self.n = A.shape[1]
        self.m = A.shape[0]
        self.lb, self.ub, self.binary = lb, ub, binary
        w = ub - lb
        self.w = np.where(w > 0, w, 1.0)
        ymax = np.where(w > 0, 1.0, 0.0)
        A1 = A * self.w
        b1 = b - A @ lb
        rmax = np.abs(A1).max(axis=1, initial=0.0)
        self.row_scale = np.where(rmax > 0, 1.0 / np.where(rmax > 0, rmax, 1.0), 1.0)
        self.A = A1 * self.row_scale[:, None]
        self.b = b1 * self.row_scale
        act_min = np.minimum(self.A, 0.0) @ ymax
        act_max = np.maximum(self.A, 0.0) @ ymax
        slo = np.zeros(self.m)
        shi = np.zeros(self.m)
        le = senses == "<="
        ge = senses == ">="
        shi[le] = np.maximum(self.b[le] - act_min[le], 0.0)
        slo[ge] = np.minimum(self.b[ge] - act_max[ge], 0.0)
        self.lo = np.concatenate([np.zeros(self.n), slo])
        self.hi = np.concatenate([ymax, shi])
        self.sign = 1.0 if model.sense == "min" else -1.0
        cy = self.sign * c * self.w
        self.obj_scale = float(np.abs(cy).max(initial=0.0)) or 1.0
        self.cost = np.concatenate([cy / self.obj_scale, np.zeros(self.m)])
        # constant so that objective(x) = sign * (obj_scale * cost@y) + offset
        self.offset = float(c @ lb) + model.obj_const

    def unscale(self, y):
        return self.lb + self.w * y[: self.n]

    def objective(self, scaled_value):
        return self.sign * self.obj_scale * scaled_value + self.offset

    def engine(self, lo=None, hi=None):
        """Cold-start engine: slack basis plus artificials for rows it violates.

        Returns (engine, cost vector, artificial column indices).
        """
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        n, m = self.n, self.m
        y0 = lo[:n].copy()
        s = self.b - self.A @ y0
        slo, shi = lo[n:], hi[n:]
        bad = (s < slo - FEAS_TOL) | (s > shi + FEAS_TOL)
        rows = np.flatnonzero(bad)
        s_at = np.clip(s, slo, shi)
        resid = s - s_at
        na = rows.size
        art = np.zeros((m, na))
        art[rows, np.arange(na)] = np.sign(resid[rows])
        Afull = np.hstack([self.A, np.eye(m), art])
        lo_f = np.concatenate([lo, np.zeros(na)])
        hi_f = np.concatenate([hi, np.maximum(np.abs(resid[rows]), 1.0)])
        eng = SimplexEngine(Afull, self.b, lo_f, hi_f)
        basis = np.arange(n, n + m)
        basis[rows] = n + m + np.arange(na)
        at_upper = np.zeros(n + m + na, dtype=bool)
        # slacks of violated rows sit at the violated bound
        at_upper[n + rows] = s[rows] > shi[rows]
        eng.set_basis(basis, at_upper)
        cost = np.concatenate([self.cost, np.zeros(na)])
        return eng, cost, n + m + np.arange(na)


def _phase1(eng: SimplexEngine, arts) -> bool:
    """Drive artificials to zero; fix them there. False if the LP is infeasible."""
    if arts.size == 0:
        return True
    c1 = np.zeros(eng.n)
    c1[arts] = 1.0
    if eng.primal(c1) != "optimal":
        raise NumericalFailure("phase 1 iteration limit")
    if float(eng.x[arts].sum()) > PHASE1_TOL:
        return False
    eng.hi[arts] = 0.0
    eng.x[arts] = 0.0
    is_art = np.zeros(eng.n, dtype=bool)
    is_art[arts] = True
    for r in range(eng.m):
        if not is_art[eng.basis[r]]:
            continue
        arow = eng.Binv[r] @ eng.A
        arow[eng.is_basic | is_art] = 0.0
        j = int(np.argmax(np.abs(arow)))
        if abs(arow[j]) > 1e-7:
            alpha = eng.Binv @ eng.A[:, j]
            eng._pivot(r, j, alpha, False)
        # otherwise the row is redundant; its artificial stays basic at zero
    eng.refactor()
    return True


def _cold_solve(sp: ScaledProblem, lo=None, hi=None):
    eng, cost, arts = sp.engine(lo, hi)
    if not _phase1(eng, arts):
        return eng, cost, "infeasible"
    if eng.primal(cost) != "optimal":
        raise NumericalFailure("phase 2 iteration limit")
    if eng.primal_infeasibility() > 1e-6:
        raise NumericalFailure("primal simplex lost feasibility")
    return eng, cost, "optimal"


def solve_lp(model: MilpModel) -> LpResult:
    """Solve the LP relaxation (binaries treated as [lb, ub] continuous)."""
    sp = ScaledProblem(model)
    eng, cost, status = _cold_solve(sp)
    if status != "optimal":
        return LpResult("infeasible", None, np.nan, eng.iterations)
    x = sp.unscale(eng.x)
    return LpResult("optimal", x, model.objective_value(x), eng.iterations)


class LpSession:
    """One feasible region, many objectives: phase 1 once, then primal
    simplex from the previous optimal basis for each new objective.
    """

    def __init__(self, model: MilpModel):
        self.sp = ScaledProblem(model)
        eng, _cost, arts = self.sp.engine()
        self.eng = eng
        self.feasible = _phase1(eng, arts)
        self.na = arts.size

    def optimize(self, coefs: dict, sense: str = "min"):
        """(objective value, x) for a linear objective over the model's feasible set."""
        if not self.feasible:
            return np.nan, None
        sp = self.sp
        c = np.zeros(sp.n)
        for j, a in coefs.items():
            c[j] = a
        sign = 1.0 if sense == "min" else -1.0
        cy = sign * c * sp.w
        scale = float(np.abs(cy).max(initial=0.0)) or 1.0
        cost = np.concatenate([cy / scale, np.zeros(sp.m + self.na)])
        if self.eng.primal(cost) != "optimal":
            raise NumericalFailure("primal simplex iteration limit")
        x = sp.unscale(self.eng.x)
        return float(c @ x), x


def _reoptimize(eng: SimplexEngine, cost) -> str:
    status = eng.dual(cost)
    if status == "infeasible":
        # confirm with a fresh factorization before trusting the verdict
        eng.refactor()
        status = eng.dual(cost)
    if status == "iter_limit":
        raise NumericalFailure("dual simplex iteration limit")
    if status == "optimal" and eng.dual_infeasibility(cost) > 10 * OPT_TOL:
        if eng.primal(cost) != "optimal":
            raise NumericalFailure("primal cleanup iteration limit")
    return status


def _polish(model: MilpModel, x, int_mask):
    """Fix the rounded binaries and re-solve the LP for clean continuous values."""
    fixed = model.copy()
    for j in np.flatnonzero(int_mask):
        fixed.fix(j, round(x[j]))
    res = solve_lp(fixed)
    return res.x if res.status == "optimal" else None


def solve_milp(model: MilpModel, gap_tol: float = 1e-6, node_limit: int = 200_000,
               int_tol: float = 1e-6, start=None) -> MilpSolution:
    """Certified optimum of a mixed-binary LP by branch-and-bound.

    Branches on the most fractional binary (lowest index on ties). Until an
    incumbent exists the search dives depth-first; afterwards it takes the
    open node of smallest bound, continuing straight into a child while
    that child's parent bound is still the best open bound. Node LPs are
    reoptimized by dual simplex from the parent basis. ``gap_tol`` is an
    absolute tolerance on the scaled objective.

    ``start`` optionally proposes values for the binaries (a full-length
    vector; other entries are ignored). If the LP with those binaries
    fixed is feasible, its solution is the first incumbent.

    Raises SolverInfeasible, or NodeLimit carrying the incumbent (if any).
    """
    t0 = time.perf_counter()
    sp = ScaledProblem(model)
    eng, cost, status = _cold_solve(sp)
    if status == "infeasible":
        raise SolverInfeasible("LP relaxation is infeasible")
    bins = np.flatnonzero(sp.binary & (sp.hi[: sp.n] > 0))
    root_lo = eng.lo.copy()
    root_hi = eng.hi.copy()

    inc_val = np.inf
    inc_y = None
    if start is not None:
        xs = _polish(model, np.asarray(start, dtype=float), sp.binary)
        if xs is not None and model.max_violation(xs) <= 1e-7:
            inc_y = (xs - sp.lb) / sp.w
            inc_val = float(sp.cost[: sp.n] @ inc_y)
    pruned_min = np.inf
    stack: list = []
    heap: list = []
    seq = 0
    nodes = 0
    fixings: tuple = ()

    def restore(fx, snap):
        eng.lo[bins] = root_lo[bins]
        eng.hi[bins] = root_hi[bins]
        for j, v in fx:
            eng.lo[j] = eng.hi[j] = v
        eng.set_basis(*snap)
        return _reoptimize(eng, cost)

    def open_bound():
        vals = [h[0] for h in heap] + [s[0] for s in stack]
        return min(vals) if vals else np.inf

    while True:
        nodes += 1
        plunge = None
        if status == "optimal":
            val = eng.objective(cost)
            if val >= inc_val - gap_tol:
                pruned_min = min(pruned_min, val)
            else:
                yb = eng.x[bins]
                frac = np.abs(yb - np.round(yb))
                if frac.max(initial=0.0) <= int_tol:
                    inc_val = val
                    inc_y = eng.x.copy()
                else:
                    k = int(np.argmax(frac))
                    j = int(bins[k])
                    first = 1.0 if yb[k] >= 0.5 else 0.0
                    snap = eng.snapshot()
                    other = (val, seq, fixings + ((j, 1.0 - first),), snap)
                    seq += 1
                    if inc_y is None:
                        stack.append(other)
                        plunge = (j, first)
                    else:
                        best_open = heap[0][0] if heap else np.inf
                        heapq.heappush(heap, other)
                        if val <= best_open + gap_tol:
                            plunge = (j, first)
                        else:
                            heapq.heappush(heap, (val, seq, fixings + ((j, first),), snap))
                            seq += 1
        if nodes >= node_limit and (plunge or heap or stack):
            bound = min(open_bound(), pruned_min, inc_val,
                        eng.objective(cost) if plunge else np.inf)
            sol = _finish(model, sp, inc_y, inc_val, bound, nodes, eng, t0, "node_limit")
            raise NodeLimit(f"node limit {node_limit} reached", solution=sol)
        if plunge is not None:
            j, v = plunge
            fixings = fixings + ((j, v),)
            eng.lo[j] = eng.hi[j] = v
            status = _reoptimize(eng, cost)
            continue
        if inc_y is None:
            if not stack:
                raise SolverInfeasible("no integer-feasible point exists")
            _, _, fixings, snap = stack.pop()
            status = restore(fixings, snap)
            continue
        for item in stack:
            heapq.heappush(heap, item)
        stack.clear()
        if not heap:
            break
        if heap[0][0] >= inc_val - gap_tol:
            pruned_min = min(pruned_min, heap[0][0])
            break
        _, _, fixings, snap = heapq.heappop(heap)
        status = restore(fixings, snap)

    bound = min(pruned_min, inc_val)
    return _finish(model, sp, inc_y, inc_val, bound, nodes, eng, t0, "optimal")


def _finish(model, sp, inc_y, inc_val, bound, nodes, eng, t0, status):
    if inc_y is None:
        return MilpSolution(status, None, np.nan, sp.objective(bound), np.inf, nodes,
                            eng.iterations, time.perf_counter() - t0)
    x = sp.unscale(inc_y)
    int_mask = sp.binary
    x[int_mask] = np.round(x[int_mask])
    polished = _polish(model, x, int_mask) if int_mask.any() else None
    if polished is not None:
        polished[int_mask] = x[int_mask]
        x = polished
    obj = model.objective_value(x)
    bnd = sp.objective(bound)
    gap = abs(obj - bnd) if np.isfinite(bnd) else np.inf
    return MilpSolution(status, x, obj, bnd, gap, nodes, eng.iterations,
                        time.perf_counter() - t0)
