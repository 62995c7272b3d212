"""Independent reference computations shared by the unit and acceptance tests.

None of these call into the code they check: partitions are enumerated,
LPs go to scipy's HiGHS or to brute-force vertex enumeration.
"""

import itertools

import numpy as np
from scipy.optimize import linprog

from segbound.milp import MilpModel
from segbound.segfit import MaterialDataSet


def block_sse(x, y):
    """Residual sum of squares of the least-squares line through the points."""
    if len(x) < 2:
        return 0.0
    A = np.column_stack([x, np.ones(len(x))])
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(np.sum((y - A @ coef) ** 2))


def partitions(r, kmax):
    for nb in range(1, min(kmax, r) + 1):
        for cuts in itertools.combinations(range(1, r), nb - 1):
            yield list(cuts)


def brute_force(data, k, mu):
    best = None
    sse = {}
    for cuts in partitions(data.r, k):
        tot = 0.0
        for lo, hi in zip([0] + cuts, cuts + [data.r]):
            if (lo, hi) not in sse:
                sse[lo, hi] = block_sse(data.strain[lo:hi], data.stress[lo:hi])
            tot += sse[lo, hi]
        tot += mu * (len(cuts) + 1)
        if best is None or tot < best[0]:
            best = (tot, cuts)
    return best


def random_data(rng, r):
    x = np.sort(rng.uniform(-3, 3, r))
    while np.any(np.diff(x) == 0):
        x = np.sort(rng.uniform(-3, 3, r))
    y = np.where(x < 0, 2 * x, 0.5 * x) + rng.normal(0, 0.3, r)
    return MaterialDataSet(x, y)


def random_model(rng, n, mc, nb=0, eq=True):
    md = MilpModel("rand")
    for j in range(n):
        if j < nb:
            md.add_var(f"b{j}", binary=True)
        else:
            lo = float(rng.uniform(-3, 0))
            md.add_var(f"x{j}", lo, lo + float(rng.uniform(0.5, 4)))
    x0 = np.array([rng.uniform(lb, ub) for lb, ub in zip(md.lb, md.ub)])
    x0[:nb] = rng.integers(0, 2, nb)
    for i in range(mc):
        a = rng.normal(size=n) * (rng.random(n) < 0.8)
        act = float(a @ x0)
        kind = rng.choice(["<=", ">=", "="] if eq and i == 0 else ["<=", ">="])
        slack = float(rng.uniform(0, 1.5))
        rhs = act + slack if kind == "<=" else (act - slack if kind == ">=" else act)
        md.add_row(dict(enumerate(a)), kind, rhs)
    md.set_objective(dict(enumerate(rng.normal(size=n))), rng.choice(["min", "max"]))
    return md


def vertex_oracle(md):
    """Best objective over all basic feasible points, by solving every n x n active set."""
    c, A, senses, b, lb, ub, _ = md.arrays()
    n = md.n
    rows = [(A[i], b[i]) for i in range(len(b))]
    rows += [(np.eye(n)[j], lb[j]) for j in range(n)] + [(np.eye(n)[j], ub[j]) for j in range(n)]
    eq = [i for i, s in enumerate(senses) if s == "="]
    others = [i for i in range(len(rows)) if i not in eq]
    combos = [tuple(eq) + cmb for cmb in itertools.combinations(others, n - len(eq))]
    M = np.array([[rows[i][0] for i in cmb] for cmb in combos])
    r = np.array([[rows[i][1] for i in cmb] for cmb in combos])
    ok = np.abs(np.linalg.det(M)) > 1e-9
    X = np.linalg.solve(M[ok], r[ok][..., None])[..., 0]
    tol = 1e-9
    feas = np.all(X >= lb - tol, axis=1) & np.all(X <= ub + tol, axis=1)
    act = X @ A.T
    for i, s in enumerate(senses):
        if s == "<=":
            feas &= act[:, i] <= b[i] + tol
        elif s == ">=":
            feas &= act[:, i] >= b[i] - tol
        else:
            feas &= np.abs(act[:, i] - b[i]) <= tol
    vals = X[feas] @ c
    if not vals.size:
        return None
    return float(vals.min() if md.sense == "min" else vals.max())


def scipy_lp(md, fixed=None):
    c, A, senses, b, lb, ub, _ = md.arrays()
    lb, ub = lb.copy(), ub.copy()
    for j, v in (fixed or {}).items():
        lb[j] = ub[j] = v
    sign = 1.0 if md.sense == "min" else -1.0
    up = [A[i] if s == "<=" else -A[i] for i, s in enumerate(senses) if s != "="]
    ub_rhs = [b[i] if s == "<=" else -b[i] for i, s in enumerate(senses) if s != "="]
    eqA = [A[i] for i, s in enumerate(senses) if s == "="]
    eqb = [b[i] for i, s in enumerate(senses) if s == "="]
    res = linprog(sign * c, A_ub=np.array(up) if up else None, b_ub=ub_rhs or None,
                  A_eq=np.array(eqA) if eqA else None, b_eq=eqb or None,
                  bounds=list(zip(lb, ub)), method="highs")
    return None if res.status == 2 else sign * res.fun


def pattern_oracle(system, uset, qoi, lam, boxes):
    """min and max of q over every assignment of members to regions, one LP per pattern."""
    d, m = system.d, system.m
    n = d + 2 * m
    A_eq = np.zeros((m + d, n))
    b_eq = np.zeros(m + d)
    A_eq[:m, :d] = -system.L
    A_eq[:m, d:d + m] = np.eye(m)
    b_eq[:m] = system.eps0
    A_eq[m:, d + m:] = system.N
    b_eq[m:] = lam * system.f_base
    lines, seps = uset.raw_lines(), uset.raw_seps()
    c = np.concatenate([qoi.cu, np.zeros(m), qoi.csig])
    bounds = [(None, None)] * d + list(zip(boxes.eps_lo, boxes.eps_hi)) + \
        list(zip(boxes.sig_lo, boxes.sig_hi))
    lo, hi = np.inf, -np.inf
    for pattern in itertools.product(range(1, uset.k + 1), repeat=m):
        rows, rhs = [], []
        for e, i in enumerate(pattern):
            ie, isg = d + e, d + m + e

            def add(ce, cs, b):
                r = np.zeros(n)
                r[ie], r[isg] = ce, cs
                rows.append(r)
                rhs.append(b)
            a, bt, g = lines[i - 1]
            add(a, bt, g + uset.tau)
            add(-a, -bt, -(g - uset.tau))
            if i >= 2:
                p, q, r = seps[i - 1]
                add(-p, -q, -r)
            if i <= uset.k - 1:
                p, q, r = seps[i]
                add(p, q, r)
        for sgn in (1.0, -1.0):
            res = linprog(sgn * c, A_ub=np.array(rows), b_ub=rhs, A_eq=A_eq, b_eq=b_eq,
                          bounds=bounds, method="highs")
            if res.status == 0:
                if sgn > 0:
                    lo = min(lo, res.fun)
                else:
                    hi = max(hi, -res.fun)
    return lo, hi
