"""Segmented least squares.

Fits at most ``k`` lines ``alpha*eps + sigma = gamma`` (beta fixed to 1) to
contiguous blocks of strain-ordered data, minimizing the total squared
residual plus ``mu`` per nonempty block. The global optimum is found by
dynamic programming over (first point, blocks left); the equivalent
mixed-integer conic model can be exported as text for external checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

__all__ = [
    "MaterialDataSet",
    "LineParams",
    "SegmentedFit",
    "fit_segment",
    "segment_dp",
    "interval_errors",
    "block_bounds",
    "export_misocp",
]


@dataclass(frozen=True)
class MaterialDataSet:
    """Strain-ordered (strain, stress) samples. Stress in MPa."""

    strain: np.ndarray
    stress: np.ndarray
    label: str = ""

    def __post_init__(self):
        strain = np.asarray(self.strain, dtype=float).reshape(-1)
        stress = np.asarray(self.stress, dtype=float).reshape(-1)
        if strain.shape != stress.shape:
            raise DataError("strain and stress must have equal length")
        if strain.size < 2:
            raise DataError(f"need at least 2 data points, got {strain.size}")
        if not (np.all(np.isfinite(strain)) and np.all(np.isfinite(stress))):
            raise DataError("data contain non-finite values")
        diffs = np.diff(strain)
        if np.any(diffs == 0):
            i = int(np.flatnonzero(diffs == 0)[0])
            raise DataError(f"duplicate strain value {strain[i]!r} at rows {i} and {i + 1}")
        if np.any(diffs < 0):
            raise DataError("strain values must be strictly increasing (use from_points to sort)")
        strain.setflags(write=False)
        stress.setflags(write=False)
        object.__setattr__(self, "strain", strain)
        object.__setattr__(self, "stress", stress)

    @classmethod
    def from_points(cls, points, label=""):
        """Build from unordered (strain, stress) pairs, sorting by strain."""
        arr = np.asarray(points, dtype=float).reshape(-1, 2)
        order = np.argsort(arr[:, 0], kind="stable")
        return cls(arr[order, 0], arr[order, 1], label)

    @property
    def r(self) -> int:
        return int(self.strain.size)

    def __len__(self):
        return self.r

    def points(self) -> np.ndarray:
        return np.column_stack([self.strain, self.stress])

    def bbox(self):
        return (float(self.strain.min()), float(self.strain.max()),
                float(self.stress.min()), float(self.stress.max()))


@dataclass(frozen=True)
class LineParams:
    """Line ``alpha*eps + beta*sigma = gamma``."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.alpha == 0.0 and self.beta == 0.0:
            raise ValueError("alpha and beta cannot both be zero")

    def residual(self, strain, stress):
        return self.alpha * np.asarray(strain) + self.beta * np.asarray(stress) - self.gamma

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma)


@dataclass
class SegmentedFit:
    lines: list[LineParams]
    breaks: list[int]
    sq_error: float
    penalty: float
    objective: float
    k: int = 0
    mu: float = 0.0
    block_errors: list[float] = field(default_factory=list)

    @property
    def k_used(self) -> int:
        return len(self.lines)

    def blocks(self, r: int) -> list[tuple[int, int]]:
        return block_bounds(self.breaks, r)


def block_bounds(breaks, r):
    """Half-open index ranges of the blocks defined by ``breaks`` (start indices of blocks 2..)."""
    edges = [0, *breaks, r]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def fit_segment(strain, stress) -> tuple[LineParams, float]:
    """Least-squares line with beta = 1 through a block of points.

    Returns the line and its squared error. A single point gives the
    horizontal line through it with zero error.
    """
    x = np.asarray(strain, dtype=float).reshape(-1)
    y = np.asarray(stress, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("empty segment")
    if x.size == 1:
        return LineParams(0.0, 1.0, float(y[0])), 0.0
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    slope = float(dx @ dy) / sxx if sxx > 0 else 0.0
    intercept = ym - slope * xm
    # sigma = intercept + slope*eps  <=>  (-slope)*eps + sigma = intercept
    line = LineParams(-slope, 1.0, float(intercept))
    res = dy - slope * dx
    return line, float(res @ res)


def interval_errors(data: MaterialDataSet) -> np.ndarray:
    """Table ``E[a, b]`` of least-squares error of points ``a..b-1`` (b > a).

    Built from prefix sums of centered and scaled data, O(1) per interval.
    Entries with ``b <= a`` are +inf.
    """
    x = data.strain
    y = data.stress
    xs = x.std() or 1.0
    ys = y.std() or 1.0
    u = (x - x.mean()) / xs
    v = (y - y.mean()) / ys
    z = np.zeros(1)
    S1 = np.concatenate([z, np.cumsum(u)])
    S2 = np.concatenate([z, np.cumsum(v)])
    Sxx = np.concatenate([z, np.cumsum(u * u)])
    Sxy = np.concatenate([z, np.cumsum(u * v)])
    Syy = np.concatenate([z, np.cumsum(v * v)])
    r = data.r
    a = np.arange(r + 1)[:, None]
    b = np.arange(r + 1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        n = (b - a).astype(float)
        sx = S1[b] - S1[a]
        sy = S2[b] - S2[a]
        cxx = Sxx[b] - Sxx[a] - sx * sx / n
        cxy = Sxy[b] - Sxy[a] - sx * sy / n
        cyy = Syy[b] - Syy[a] - sy * sy / n
        err = np.where(cxx > 1e-300, cyy - cxy * cxy / cxx, cyy)
    err = np.maximum(err, 0.0) * (ys * ys)
    err[b <= a] = np.inf
    err[(b - a) == 1] = 0.0
    return err


def segment_dp(data: MaterialDataSet, k: int, mu: float) -> SegmentedFit:
    """Globally optimal segmentation into at most ``k`` contiguous blocks.

    Minimizes total squared error + ``mu`` * (number of blocks). Ties go to
    fewer blocks, then to the lexicographically smallest break list.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mu < 0:
        raise ValueError("mu must be >= 0")
    r = data.r
    E = interval_errors(data)
    kmax = min(k, r)
    # G[j, a]: best cost of covering points a..r-1 with exactly j blocks
    G = np.full((kmax + 1, r + 1), np.inf)
    G[0, r] = 0.0
    for j in range(1, kmax + 1):
        cand = E[:r, :] + mu + G[j - 1][None, :]
        G[j, :r] = cand.min(axis=1)
    totals = G[1:, 0]
    nblocks = int(np.argmin(totals)) + 1  # first minimum = fewest blocks
    # forward reconstruction: smallest feasible break at each step
    breaks = []
    a = 0
    for j in range(nblocks, 1, -1):
        cand = E[a, :] + mu + G[j - 1]
        b = int(np.argmin(cand))
        breaks.append(b)
        a = b
    lines, errs = [], []
    for lo, hi in block_bounds(breaks, r):
        line, err = fit_segment(data.strain[lo:hi], data.stress[lo:hi])
        lines.append(line)
        errs.append(err)
    sq = float(np.sum(errs))
    pen = mu * len(lines)
    return SegmentedFit(lines=lines, breaks=breaks, sq_error=sq, penalty=pen,
                        objective=sq + pen, k=k, mu=mu, block_errors=errs)


def recompute_objective(data: MaterialDataSet, fit: SegmentedFit) -> float:
    """Objective from the lines and breaks by direct residual evaluation."""
    total = 0.0
    for line, (lo, hi) in zip(fit.lines, fit.blocks(data.r)):
        res = line.residual(data.strain[lo:hi], data.stress[lo:hi])
        total += float(res @ res)
    return total + fit.mu * fit.k_used


def _fmt(x: float) -> str:
    return repr(float(x))


def _term(coef: float, name: str) -> str:
    coef = float(coef) + 0.0  # drops negative zero
    return f"- {_fmt(-coef)} {name}" if coef < 0 else f"+ {_fmt(coef)} {name}"


def export_misocp(data: MaterialDataSet, k: int, mu: float, bigM: float) -> str:
    """Mixed-integer quadratically constrained model of the segmentation problem.

    The text uses the CPLEX LP file format (quadratic constraint terms in
    square brackets, binaries in a ``Binaries`` section), readable by
    CPLEX, Gurobi and SCIP. Variables:

    * ``t_l_i``  binary, 1 for the first ``h`` columns of row ``l`` when
      point ``l`` belongs to block ``h``;
    * ``v_l_i``  >= 0, squared error of point ``l`` charged to line ``i``;
    * ``a_i``, ``g_i``  free, line ``a_i*eps + sigma = g_i`` (beta eliminated, = 1).

    Indices are 1-based. The header comments record r, k, mu and bigM.
    """
    if bigM <= 0:
        raise ValueError("bigM must be positive")
    r = data.r
    eps, sig = data.strain, data.stress
    t = lambda l, i: f"t_{l}_{i}"  # noqa: E731
    v = lambda l, i: f"v_{l}_{i}"  # noqa: E731
    out = [
        "\\ segmented least squares as a mixed-integer QCP",
        f"\\ r = {r}",
        f"\\ k = {k}",
        f"\\ mu = {_fmt(mu)}",
        f"\\ bigM = {_fmt(bigM)}",
        f"\\ label = {data.label}",
        "Minimize",
    ]
    terms = [v(l, i) for l in range(1, r + 1) for i in range(1, k + 1)]
    terms += [f"{_fmt(mu)} {t(r, i)}" for i in range(1, k + 1)]
    out.append(" obj: " + " + ".join(terms))
    out.append("Subject To")
    for i in range(1, k + 1):
        for l in range(1, r):
            out.append(f" col_{i}_{l}: {t(l, i)} - {t(l + 1, i)} <= 0")
    for l in range(1, r + 1):
        for i in range(1, k):
            out.append(f" row_{l}_{i}: {t(l, i + 1)} - {t(l, i)} <= 0")
    out.append(f" first: {t(1, 1)} = 1")
    for l in range(1, r + 1):
        e, s = float(eps[l - 1]), float(sig[l - 1])
        for i in range(1, k + 1):
            # v + M(1 - t_li + t_l,i+1) >= (e a + s - g)^2, expanded
            lin = [v(l, i), _term(-bigM, t(l, i))]
            if i < k:
                lin.append(_term(bigM, t(l, i + 1)))
            lin.append(_term(-2 * e * s, f"a_{i}"))
            lin.append(_term(2 * s, f"g_{i}"))
            quad = " ".join([f"{_fmt(e * e)} a_{i} ^2", _term(-2 * e, f"a_{i} * g_{i}"),
                             f"+ g_{i} ^2"])
            out.append(f" err_{l}_{i}: " + " ".join(lin) + f" - [ {quad} ] >= {_fmt(s * s - bigM)}")
    out.append("Bounds")
    for i in range(1, k + 1):
        out.append(f" a_{i} free")
        out.append(f" g_{i} free")
    out.append("Binaries")
    out.extend(f" {t(l, i)}" for l in range(1, r + 1) for i in range(1, k + 1))
    out.append("End")
    return "\n".join(out) + "\n"
