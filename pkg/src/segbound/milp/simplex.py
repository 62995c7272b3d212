"""Dense bounded-variable simplex on ``A x = b, lo <= x <= hi``.

The engine keeps an explicit basis inverse updated by rank-one (product
form) pivots and refactorized every ``REFACTOR`` pivots. It offers a
primal phase (cold starts, with artificials added by the caller) and a
dual phase used to reoptimize after bound changes in branch-and-bound.
Every variable has finite bounds, so the primal phase cannot be unbounded.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericalFailure

REFACTOR = 50
PIV_TOL = 1e-9
FEAS_TOL = 1e-9
OPT_TOL = 1e-9
DEGEN_SWITCH = 50


class SimplexEngine:
    def __init__(self, A, b, lo, hi):
        self.A = np.ascontiguousarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.lo = np.asarray(lo, dtype=float).copy()
        self.hi = np.asarray(hi, dtype=float).copy()
        self.m, self.n = self.A.shape
        self.basis = np.zeros(self.m, dtype=int)
        self.is_basic = np.zeros(self.n, dtype=bool)
        self.at_upper = np.zeros(self.n, dtype=bool)
        self.x = np.zeros(self.n)
        self.Binv = np.eye(self.m)
        self.pivots = 0
        self.iterations = 0

    # basis bookkeeping

    def set_basis(self, basis, at_upper):
        self.basis = np.asarray(basis, dtype=int).copy()
        self.is_basic[:] = False
        self.is_basic[self.basis] = True
        self.at_upper = np.asarray(at_upper, dtype=bool).copy()
        self.at_upper[self.is_basic] = False
        self.refactor()

    def snapshot(self):
        return self.basis.copy(), self.at_upper.copy()

    def _place_nonbasic(self):
        nb = ~self.is_basic
        self.x[nb] = np.where(self.at_upper[nb], self.hi[nb], self.lo[nb])

    def refactor(self):
        try:
            self.Binv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular basis during refactorization") from exc
        self._place_nonbasic()
        self.recompute_basic()
        self.pivots = 0

    def recompute_basic(self):
        nb = ~self.is_basic
        rhs = self.b - self.A[:, nb] @ self.x[nb]
        self.x[self.basis] = self.Binv @ rhs

    def _pivot(self, r, j, alpha, leave_upper):
        piv = alpha[r]
        row = self.Binv[r] / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[r] = row
        leaving = self.basis[r]
        self.basis[r] = j
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.at_upper[j] = False
        self.at_upper[leaving] = leave_upper
        self.x[leaving] = self.hi[leaving] if leave_upper else self.lo[leaving]
        self.pivots += 1
        if self.pivots >= REFACTOR:
            self.refactor()
        return leaving

    def reduced_costs(self, cost):
        y = cost[self.basis] @ self.Binv
        d = cost - y @ self.A
        d[self.is_basic] = 0.0
        return d

    def objective(self, cost):
        return float(cost @ self.x)

    def primal_infeasibility(self):
        xb = self.x[self.basis]
        return max(0.0, float(np.max(self.lo[self.basis] - xb, initial=0.0)),
                   float(np.max(xb - self.hi[self.basis], initial=0.0)))

    # primal simplex

    def primal(self, cost, max_iter=None):
        """Optimize ``cost @ x`` from a primal feasible basis. Returns 'optimal' or 'iter_limit'."""
        max_iter = max_iter or 50 * (self.m + self.n) + 1000
        degenerate = 0
        movable = self.hi > self.lo
        for _ in range(max_iter):
            d = self.reduced_costs(cost)
            nb = ~self.is_basic & movable
            inc = nb & ~self.at_upper & (d < -OPT_TOL)
            dec = nb & self.at_upper & (d > OPT_TOL)
            cand = inc | dec
            if not cand.any():
                return "optimal"
            if degenerate >= DEGEN_SWITCH:
                j = int(np.flatnonzero(cand)[0])      # Bland
            else:
                j = int(np.argmax(np.where(cand, np.abs(d), -1.0)))
            direction = 1.0 if inc[j] else -1.0
            alpha = self.Binv @ self.A[:, j]
            r, t, to_upper = self._primal_ratio(alpha, direction, bland=degenerate >= DEGEN_SWITCH)
            span = self.hi[j] - self.lo[j]
            self.iterations += 1
            if r < 0 or span <= t:
                # bound flip of the entering variable
                step = span
                self.x[self.basis] -= direction * step * alpha
                self.at_upper[j] = not self.at_upper[j]
                self.x[j] = self.hi[j] if self.at_upper[j] else self.lo[j]
                degenerate = 0
                continue
            self.x[self.basis] -= direction * t * alpha
            self.x[j] += direction * t
            self._pivot(r, j, alpha, to_upper)
            degenerate = degenerate + 1 if t <= 1e-12 else 0
        return "iter_limit"

    def _primal_ratio(self, alpha, direction, bland=False):
        """Harris two-pass ratio test. Returns (row, step, leaves_at_upper); row -1 if none."""
        rate = -direction * alpha
        xb = self.x[self.basis]
        lo = self.lo[self.basis]
        hi = self.hi[self.basis]
        dn = rate < -PIV_TOL
        up = rate > PIV_TOL
        if not (dn.any() or up.any()):
            return -1, np.inf, False
        with np.errstate(divide="ignore", invalid="ignore"):
            relaxed = np.full(self.m, np.inf)
            relaxed[dn] = (xb[dn] - lo[dn] + FEAS_TOL) / -rate[dn]
            relaxed[up] = (hi[up] - xb[up] + FEAS_TOL) / rate[up]
            exact = np.full(self.m, np.inf)
            exact[dn] = (xb[dn] - lo[dn]) / -rate[dn]
            exact[up] = (hi[up] - xb[up]) / rate[up]
        bound = relaxed.min()
        ok = exact <= bound
        if bland:
            # among ties choose the smallest variable index
            idx = np.flatnonzero(ok)
            r = int(idx[np.argmin(self.basis[idx])])
        else:
            r = int(np.argmax(np.where(ok, np.abs(rate), -1.0)))
        t = max(float(exact[r]), 0.0)
        return r, t, bool(up[r])

    # dual simplex

    def dual(self, cost, max_iter=None):
        """Restore primal feasibility from a dual feasible basis.

        Returns 'optimal', 'infeasible' or 'iter_limit'.
        """
        max_iter = max_iter or 50 * (self.m + self.n) + 1000
        movable = self.hi > self.lo
        stalls = 0
        for _ in range(max_iter):
            xb = self.x[self.basis]
            below = self.lo[self.basis] - xb
            above = xb - self.hi[self.basis]
            viol = np.maximum(below, above)
            if viol.max(initial=0.0) <= FEAS_TOL:
                return "optimal"
            if stalls >= DEGEN_SWITCH:
                cand = np.flatnonzero(viol > FEAS_TOL)
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                r = int(np.argmax(viol))
            to_lower = below[r] > above[r]
            target = self.lo[self.basis[r]] if to_lower else self.hi[self.basis[r]]
            arow = self.Binv[r] @ self.A
            d = self.reduced_costs(cost)
            nb = ~self.is_basic & movable
            if to_lower:
                elig = nb & ((~self.at_upper & (arow < -PIV_TOL)) | (self.at_upper & (arow > PIV_TOL)))
            else:
                elig = nb & ((~self.at_upper & (arow > PIV_TOL)) | (self.at_upper & (arow < -PIV_TOL)))
            if not elig.any():
                return "infeasible"
            idx = np.flatnonzero(elig)
            absa = np.abs(arow[idx])
            # dual feasible sign: d >= 0 at lower, d <= 0 at upper
            dd = np.maximum(np.where(self.at_upper[idx], -d[idx], d[idx]), 0.0)
            bound = ((dd + OPT_TOL) / absa).min()
            ok = dd / absa <= bound
            if stalls >= DEGEN_SWITCH:
                j = int(idx[ok][0])
            else:
                j = int(idx[ok][np.argmax(absa[ok])])
            theta = dd[idx == j][0] / abs(arow[j])
            alpha = self.Binv @ self.A[:, j]
            if abs(alpha[r]) < PIV_TOL:
                raise NumericalFailure("dual simplex pivot element vanished")
            step = (self.x[self.basis[r]] - target) / alpha[r]
            self.x[self.basis] -= alpha * step
            self.x[j] += step
            self.iterations += 1
            self._pivot(r, j, alpha, not to_lower)
            stalls = stalls + 1 if theta <= 1e-12 else 0
        return "iter_limit"

    def dual_infeasibility(self, cost):
        d = self.reduced_costs(cost)
        nb = ~self.is_basic & (self.hi > self.lo)
        bad = np.where(self.at_upper, d, -d)
        return float(np.max(np.where(nb, bad, 0.0), initial=0.0))
