"""Sample-count requirement from order statistics.

Given r i.i.d. samples, a set containing ``ptilde`` of them covers an
unseen sample with probability at least ``1 - epsilon`` at confidence
``1 - delta`` when the upper binomial tail below is at most ``delta``.

Binomial terms are evaluated with Loader's saddle-point expansion
(``stirlerr``/``bd0``), which keeps the log of each term accurate to a
few ulps even for r ~ 1e6, and the terms are combined with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleStatistics

__all__ = ["ReliabilitySpec", "binomial_tail", "compute_ptilde", "log_binom_pmf"]

_LN_2PI = math.log(2.0 * math.pi)
_HALF_LN_2PI = 0.5 * _LN_2PI

# terms below exp(-_CUTOFF) of the largest one are dropped; their total
# relative contribution is < 1e6 * exp(-60) ~ 1e-20
_CUTOFF = 60.0


@dataclass(frozen=True)
class ReliabilitySpec:
    """Target reliability ``1 - epsilon`` and confidence ``1 - delta`` for ``r`` samples."""

    epsilon: float
    delta: float
    r: int

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in ]0,1[, got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in ]0,1[, got {self.delta}")
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r}")


def _stirlerr(n: int) -> float:
    # log(n!) - log(sqrt(2 pi n) (n/e)^n)
    if n <= 15:
        if n == 0:
            return 0.0  # unused: callers special-case the endpoints
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _HALF_LN_2PI
    nn = float(n) * n
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    if n > 500:
        return (s0 - s1 / nn) / n
    if n > 80:
        return (s0 - (s1 - s2 / nn) / nn) / n
    if n > 35:
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


def _bd0(x: float, np_: float) -> float:
    # x log(x/np) + np - x, without cancellation when x ~ np
    if abs(x - np_) < 0.1 * (x + np_):
        v = (x - np_) / (x + np_)
        s = (x - np_) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / np_) + np_ - x


def log_binom_pmf(k: int, n: int, p: float, q: float | None = None) -> float:
    """log of C(n,k) p^k q^(n-k), with ``q = 1 - p`` passed explicitly when known exactly."""
    if q is None:
        q = 1.0 - p
    if k == 0:
        return -_bd0(n, n * q) - n * p if p < 0.1 else n * math.log(q)
    if k == n:
        return -_bd0(n, n * p) - n * q if q < 0.1 else n * math.log(p)
    lc = (_stirlerr(n) - _stirlerr(k) - _stirlerr(n - k)
          - _bd0(k, n * p) - _bd0(n - k, n * q))
    lf = _LN_2PI + math.log(k) + math.log1p(-k / n)
    return lc - 0.5 * lf


def binomial_tail(r: int, k0: int, epsilon: float) -> float:
    """Sum over k = k0..r of C(r,k) (1-eps)^k eps^(r-k)."""
    if not 0 <= k0 <= r:
        raise ValueError(f"need 0 <= k0 <= r, got k0={k0}, r={r}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in ]0,1[, got {epsilon}")
    if k0 == 0:
        return 1.0
    p, q = 1.0 - epsilon, epsilon

    def term(k):
        return log_binom_pmf(k, r, p, q)

    # the pmf is unimodal with mode floor((r+1) p)
    mode = min(r, int(math.floor((r + 1) * p)))
    start = max(k0, mode)
    lmax = term(start)
    logs = [lmax]
    for k in range(start + 1, r + 1):
        lk = term(k)
        if lk < lmax - _CUTOFF:
            break
        logs.append(lk)
    for k in range(start - 1, k0 - 1, -1):
        lk = term(k)
        if lk < lmax - _CUTOFF:
            break
        logs.append(lk)
    logs.sort(reverse=True)
    total = math.fsum(math.exp(v - lmax) for v in logs)
    return min(1.0, math.exp(lmax) * total)


def compute_ptilde(spec: ReliabilitySpec) -> int:
    """Smallest integer ``p`` in [1, r] with ``binomial_tail(r, p, eps) <= delta``.

    Raises
    ------
    InfeasibleStatistics
        If even ``p = r`` fails, i.e. ``(1 - eps)**r > delta``. The error
        carries the smallest achievable delta.
    """
    r, eps, delta = spec.r, spec.epsilon, spec.delta
    min_delta = binomial_tail(r, r, eps)
    if min_delta > delta:
        raise InfeasibleStatistics(
            f"no sample count satisfies delta={delta:g} with r={r}, epsilon={eps:g}; "
            f"the minimum achievable delta is (1-epsilon)^r = {min_delta:.6e}",
            min_delta=min_delta,
        )
    lo, hi = 1, r  # invariant: tail(hi) <= delta
    while lo < hi:
        mid = (lo + hi) // 2
        if binomial_tail(r, mid, eps) <= delta:
            hi = mid
        else:
            lo = mid + 1
    return hi
