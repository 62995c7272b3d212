"""Equilibrium under a fitted piecewise-linear stress-strain law.

Solves ``N sigma(L u + eps0) = lam f`` by damped Newton with Armijo
backtracking on the residual norm. The tangent ``N diag(E_t) L`` is
piecewise constant; when it is singular (slack cables with zero slope)
every member modulus is raised by ``1e-8 * max |slope|`` for that step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLine, NoConvergence, NonMonotoneBreakpoints, SingularTangent
from .structure import AssembledSystem
from .uncertainty import UncertaintySet

__all__ = [
    "PiecewiseLinearLaw",
    "EquilibriumState",
    "law_from_fit",
    "solve_equilibrium",
    "solve_path",
]

MAX_ITER = 200
REG_FACTOR = 1e-8
COND_LIMIT = 1e12


@dataclass(frozen=True)
class PiecewiseLinearLaw:
    """``sigma = slope_i * eps + intercept_i`` on ``[breaks_{i-1}, breaks_i]``."""

    slopes: np.ndarray
    intercepts: np.ndarray
    breaks: np.ndarray

    def __post_init__(self):
        slopes = np.atleast_1d(np.asarray(self.slopes, dtype=float))
        icpt = np.atleast_1d(np.asarray(self.intercepts, dtype=float))
        brk = np.atleast_1d(np.asarray(self.breaks, dtype=float))
        if icpt.shape != slopes.shape or brk.size != slopes.size - 1:
            raise ValueError("need k slopes, k intercepts and k-1 breaks")
        if np.any(np.diff(brk) <= 0):
            raise NonMonotoneBreakpoints("breakpoint strains must increase")
        left = slopes[:-1] * brk + icpt[:-1]
        right = slopes[1:] * brk + icpt[1:]
        if np.any(np.abs(left - right) > 1e-9 * np.maximum(1.0, np.abs(left))):
            raise ValueError("segments do not meet at the breakpoints")
        for name, arr in (("slopes", slopes), ("intercepts", icpt), ("breaks", brk)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def continuous(cls, slopes, breaks, stress_at_zero=0.0):
        """Law through ``(0, stress_at_zero)`` with the given slopes and breaks."""
        slopes = np.asarray(slopes, dtype=float)
        breaks = np.asarray(breaks, dtype=float)
        k = slopes.size
        # value at each break, walking out from the segment containing 0
        i0 = int(np.searchsorted(breaks, 0.0, side="right"))
        icpt = np.empty(k)
        icpt[i0] = stress_at_zero
        for i in range(i0 + 1, k):
            icpt[i] = icpt[i - 1] + (slopes[i - 1] - slopes[i]) * breaks[i - 1]
        for i in range(i0 - 1, -1, -1):
            icpt[i] = icpt[i + 1] + (slopes[i + 1] - slopes[i]) * breaks[i]
        return cls(slopes, icpt, breaks)

    @property
    def k(self) -> int:
        return int(self.slopes.size)

    def segment(self, eps) -> np.ndarray:
        """0-based segment index; a strain exactly at a break belongs to the right segment."""
        return np.searchsorted(self.breaks, np.asarray(eps, dtype=float), side="right")

    def stress(self, eps):
        i = self.segment(eps)
        return self.slopes[i] * np.asarray(eps, dtype=float) + self.intercepts[i]

    def tangent(self, eps):
        return self.slopes[self.segment(eps)]

    def __call__(self, eps):
        return self.stress(eps)


def law_from_fit(uset: UncertaintySet) -> PiecewiseLinearLaw:
    """Law following the set's lines, switching at the breakpoint strains."""
    lines = uset.raw_lines()
    if np.any(lines[:, 1] == 0):
        raise DegenerateLine("a line with beta = 0 has no stress-strain form")
    slopes = -lines[:, 0] / lines[:, 1]
    icpt = lines[:, 2] / lines[:, 1]
    brk = uset.raw_breakpoints()[:, 0] if uset.k > 1 else np.zeros(0)
    if np.any(np.diff(brk) <= 0):
        raise NonMonotoneBreakpoints("breakpoint strains must increase")
    # re-anchor intercepts so the segments meet exactly at the breaks
    for i in range(1, slopes.size):
        icpt[i] = icpt[i - 1] + (slopes[i - 1] - slopes[i]) * brk[i - 1]
    return PiecewiseLinearLaw(slopes, icpt, brk)


@dataclass
class EquilibriumState:
    lam: float
    u: np.ndarray
    eps: np.ndarray
    sig: np.ndarray
    residual: float
    iterations: int
    regularized: bool = False


def _laws_per_member(system, laws):
    if isinstance(laws, PiecewiseLinearLaw):
        return [laws] * system.m
    return [laws[g] for g in system.groups]


class _Evaluator:
    def __init__(self, system, laws):
        self.sys = system
        self.per = _laws_per_member(system, laws)
        self.groups = {}
        for e, law in enumerate(self.per):
            self.groups.setdefault(id(law), (law, []))[1].append(e)
        self.groups = [(law, np.array(idx)) for law, idx in self.groups.values()]
        self.max_slope = max(float(np.max(np.abs(law.slopes))) for law, _ in self.groups)

    def state(self, u):
        eps = self.sys.L @ u + self.sys.eps0
        sig = np.empty_like(eps)
        et = np.empty_like(eps)
        for law, idx in self.groups:
            sig[idx] = law.stress(eps[idx])
            et[idx] = law.tangent(eps[idx])
        return eps, sig, et


def solve_equilibrium(system: AssembledSystem, laws, lam: float, u_init=None,
                      max_iter: int = MAX_ITER, rtol: float = 1e-8,
                      atol: float = 1e-10) -> EquilibriumState:
    """Damped Newton for ``N sigma(L u + eps0) = lam f``.

    ``laws`` is one law for all members or a mapping group -> law.
    Converged when ``|R| <= rtol |lam f| + atol`` (newtons).
    """
    ev = _Evaluator(system, laws)
    f = lam * system.f_base
    target = rtol * float(np.linalg.norm(f)) + atol
    u = np.zeros(system.d) if u_init is None else np.asarray(u_init, dtype=float).copy()
    eps, sig, et = ev.state(u)
    R = system.N @ sig - f
    rn = float(np.linalg.norm(R))
    regularized = False
    for it in range(max_iter + 1):
        if rn <= target:
            return EquilibriumState(float(lam), u, eps, sig, rn, it, regularized)
        if it == max_iter:
            break
        K = system.N @ (et[:, None] * system.L)
        if not np.all(np.isfinite(K)) or np.linalg.cond(K) > COND_LIMIT:
            K = system.N @ ((et + REG_FACTOR * ev.max_slope)[:, None] * system.L)
            regularized = True
            if np.linalg.cond(K) > COND_LIMIT:
                raise SingularTangent(f"tangent stiffness is singular at lambda={lam:g}")
        du = np.linalg.solve(K, -R)
        t = 1.0
        while True:
            u_try = u + t * du
            eps_t, sig_t, et_t = ev.state(u_try)
            R_t = system.N @ sig_t - f
            rn_t = float(np.linalg.norm(R_t))
            if rn_t <= (1.0 - 1e-4 * t) * rn or t < 1e-12:
                break
            t *= 0.5
        u, eps, sig, et, R, rn = u_try, eps_t, sig_t, et_t, R_t, rn_t
    raise NoConvergence(f"Newton did not converge at lambda={lam:g} (|R| = {rn:.3e} N)")


def solve_path(system: AssembledSystem, laws, lams, u_init=None, **kwargs) -> list:
    """States along increasing load factors, each warm-started from the previous one.

    A failed step is retried through intermediate load factors.
    """
    out = []
    u = u_init
    prev = 0.0
    for lam in lams:
        try:
            st = solve_equilibrium(system, laws, lam, u, **kwargs)
        except (NoConvergence, SingularTangent):
            st = None
            steps = 2
            while st is None and steps <= 64:
                try:
                    uu = u
                    for t in np.linspace(prev, lam, steps + 1)[1:]:
                        st = solve_equilibrium(system, laws, float(t), uu, **kwargs)
                        uu = st.u
                except (NoConvergence, SingularTangent):
                    st = None
                    steps *= 2
            if st is None:
                raise
        out.append(st)
        u, prev = st.u, lam
    return out
