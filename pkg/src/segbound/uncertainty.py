"""Nonconvex band around a fitted piecewise-linear stress-strain relation.

The band ``C(tau)`` is the union over regions ``i`` of the strips
``|alpha_i e + beta_i s - gamma_i| <= tau`` clipped to region ``i``, where
region ``i`` lies between separator lines ``i-1`` and ``i``. Separator
``i`` passes through the intersection of lines ``i`` and ``i+1`` and
through the corresponding corners of the shifted lines.

All geometry lives in scaled coordinates ``(strain / strain_unit, stress)``
so that typical slopes are O(1) and the single half-width ``tau`` means
the same thing on steep and flat segments. Public functions take raw
(strain, stress) points.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (DegenerateLine, NoRegion, NonMonotoneBreakpoints, ParallelLines,
                     TauMaxTooSmall)
from .segfit import LineParams, MaterialDataSet, SegmentedFit

__all__ = [
    "UncertaintySet",
    "normalize_lines",
    "breakpoints",
    "separators",
    "build_geometry",
    "region_of",
    "regions_of",
    "admissible_regions",
    "contains",
    "member_region",
    "data_residuals",
    "count_members",
    "calibrate_tau",
    "calibrate_tau_exact",
    "region_polygon",
    "hull_inequalities",
]

DET_TOL = 1e-10
EPS_BI = 1e-7


@dataclass(frozen=True)
class UncertaintySet:
    """Normalized lines, separators and half-width, in scaled coordinates.

    ``lines`` is (k, 3) of (alpha, beta, gamma); ``seps`` is (k+1, 3) of
    (p, q, r) with zero sentinel rows first and last; ``breakpoints`` is
    (k-1, 2).
    """

    lines: np.ndarray
    seps: np.ndarray
    breakpoints: np.ndarray
    tau: float = 0.0
    strain_unit: float = 1.0
    ptilde: int | None = None
    epsilon: float | None = None
    delta: float | None = None
    eps_bi: float | None = None
    label: str = ""
    bbox: tuple | None = None    # raw data (strain min, strain max, stress min, stress max)

    @property
    def k(self) -> int:
        return int(self.lines.shape[0])

    def with_tau(self, tau: float, **meta) -> UncertaintySet:
        return replace(self, tau=float(tau), **meta)

    def scaled(self, strain, stress):
        return np.asarray(strain, dtype=float) / self.strain_unit, np.asarray(stress, dtype=float)

    def raw_lines(self) -> np.ndarray:
        """Line coefficients acting on raw strain."""
        out = self.lines.copy()
        out[:, 0] /= self.strain_unit
        return out

    def raw_seps(self) -> np.ndarray:
        out = self.seps.copy()
        out[:, 0] /= self.strain_unit
        return out

    def raw_breakpoints(self) -> np.ndarray:
        out = self.breakpoints.copy()
        if out.size:
            out[:, 0] *= self.strain_unit
        return out


def normalize_lines(lines, allow_nonpositive_slope: bool = False,
                    strain_unit: float = 1.0) -> list[LineParams]:
    """Scale each line to unit normal ``(alpha, beta)``.

    Orientation is fixed so that ``beta > 0``, i.e. all normals point to
    the high-stress side; for lines of positive slope this is the same as
    ``alpha < 0``. Lines whose slope is not positive (``alpha >= 0`` after
    orientation) raise DegenerateLine unless ``allow_nonpositive_slope``.
    ``strain_unit`` rescales raw-strain coefficients first.
    """
    if isinstance(lines, SegmentedFit):
        lines = lines.lines
    out = []
    for i, ln in enumerate(lines):
        a, b, g = (ln.as_tuple() if isinstance(ln, LineParams) else tuple(map(float, ln)))
        a *= strain_unit
        nrm = float(np.hypot(a, b))
        if not nrm > 0:
            raise DegenerateLine(f"line {i + 1} has zero normal")
        a, b, g = a / nrm, b / nrm, g / nrm
        if b < 0 or (b == 0 and a > 0):
            a, b, g = -a, -b, -g
        if b == 0:
            raise DegenerateLine(f"line {i + 1} is vertical (beta = 0)")
        if a >= 0 and not allow_nonpositive_slope:
            raise DegenerateLine(
                f"line {i + 1} has non-positive slope (alpha = {a:.3g} >= 0 after normalization)")
        out.append(LineParams(a + 0.0, b + 0.0, g + 0.0))
    return out


def _as_array(lines) -> np.ndarray:
    if isinstance(lines, np.ndarray):
        return lines.astype(float).reshape(-1, 3)
    return np.array([ln.as_tuple() if isinstance(ln, LineParams) else ln for ln in lines],
                    dtype=float).reshape(-1, 3)


def breakpoints(lines) -> np.ndarray:
    """Intersections of consecutive lines, shape (k-1, 2)."""
    L = _as_array(lines)
    pts = []
    for i in range(L.shape[0] - 1):
        a1, b1, g1 = L[i]
        a2, b2, g2 = L[i + 1]
        det = a1 * b2 - a2 * b1
        if abs(det) <= DET_TOL:
            raise ParallelLines(f"lines {i + 1} and {i + 2} are parallel (det = {det:.3g})",
                                index=i + 1)
        pts.append(((b2 * g1 - b1 * g2) / det, (g2 * a1 - g1 * a2) / det))
    return np.array(pts, dtype=float).reshape(-1, 2)


def separators(lines, bps) -> np.ndarray:
    """Separator coefficients (p, q, r), rows 0..k, zero sentinels at both ends.

    ``(p, q)`` is the difference of consecutive unit normals, which points
    into region ``i+1`` when the slope increases across the breakpoint.
    Where it decreases the triple is negated, so region ``i`` is always the
    side ``p e + q s <= r``.
    """
    L = _as_array(lines)
    k = L.shape[0]
    S = np.zeros((k + 1, 3))
    for i in range(1, k):
        det = L[i - 1, 0] * L[i, 1] - L[i, 0] * L[i - 1, 1]
        sgn = 1.0 if det > 0 else -1.0
        p = sgn * (L[i - 1, 0] - L[i, 0])
        q = sgn * (L[i - 1, 1] - L[i, 1])
        u0, v0 = bps[i - 1]
        S[i] = (p, q, p * u0 + q * v0)
    return S


def build_geometry(fit, allow_nonpositive_slope: bool = False, strain_unit: float = 1.0,
                   label: str = "") -> UncertaintySet:
    """Normalized lines, breakpoints and separators for a fit (tau = 0)."""
    lines = normalize_lines(fit, allow_nonpositive_slope, strain_unit)
    L = _as_array(lines)
    bps = breakpoints(L)
    if bps.shape[0] > 1 and np.any(np.diff(bps[:, 0]) <= 0):
        raise NonMonotoneBreakpoints(
            "breakpoint strains are not increasing with the segment index: "
            + ", ".join(f"{u:.6g}" for u in bps[:, 0]))
    return UncertaintySet(lines=L, seps=separators(L, bps), breakpoints=bps,
                          strain_unit=strain_unit, label=label)


def _sep_values(uset: UncertaintySet, e, s):
    # (n, k+1) values p_i e + q_i s - r_i
    S = uset.seps
    return np.outer(e, S[:, 0]) + np.outer(s, S[:, 1]) - S[:, 2]


def _region_table(uset, e, s, tol=0.0):
    """Boolean (n, k) table: region i's separator inequalities hold (within tol)."""
    g = _sep_values(uset, e, s)
    lower_ok = g[:, :-1] >= -tol   # p_{i-1} x >= r_{i-1}
    upper_ok = g[:, 1:] <= tol     # p_i x <= r_i
    lower_ok[:, 0] = True
    upper_ok[:, -1] = True
    return lower_ok & upper_ok


def regions_of(uset: UncertaintySet, strain, stress) -> np.ndarray:
    """1-based region index for each raw point (first region whose inequalities hold)."""
    e, s = uset.scaled(np.atleast_1d(strain), np.atleast_1d(stress))
    table = _region_table(uset, e, s)
    ok = table.any(axis=1)
    if not ok.all():
        j = int(np.flatnonzero(~ok)[0])
        raise NoRegion(f"point ({strain[j]!r}, {stress[j]!r}) matches no region")
    return table.argmax(axis=1) + 1


def region_of(point, uset: UncertaintySet) -> int:
    """Region of a raw (strain, stress) point; ties resolve to the smaller index."""
    return int(regions_of(uset, [point[0]], [point[1]])[0])


def admissible_regions(point, uset: UncertaintySet, tol: float = 0.0) -> list[int]:
    """All regions whose separator inequalities hold at the point, within ``tol``."""
    e, s = uset.scaled([point[0]], [point[1]])
    return [int(i) + 1 for i in np.flatnonzero(_region_table(uset, e, s, tol)[0])]


def _abs_residual(uset, e, s, region):
    a, b, g = uset.lines[region - 1].T
    return np.abs(a * e + b * s - g)


def contains(point, uset: UncertaintySet) -> bool:
    """Membership in C(tau) using the region given by ``region_of``."""
    i = region_of(point, uset)
    e, s = uset.scaled(point[0], point[1])
    return bool(_abs_residual(uset, e, s, i) <= uset.tau)


def member_region(point, uset: UncertaintySet, tol: float = 0.0) -> int | None:
    """Smallest region ``i`` with the point inside region ``i``'s strip, or None.

    Differs from ``contains`` only where separator half-planes overlap
    (far from the breakpoints); it is the membership the mixed-integer
    encoding represents.
    """
    e, s = uset.scaled(point[0], point[1])
    for i in admissible_regions(point, uset, tol):
        if _abs_residual(uset, e, s, i) <= uset.tau + tol:
            return i
    return None


def data_residuals(data: MaterialDataSet, uset: UncertaintySet) -> np.ndarray:
    """|residual| of each data point w.r.t. the line of its region."""
    reg = regions_of(uset, data.strain, data.stress)
    e, s = uset.scaled(data.strain, data.stress)
    return _abs_residual(uset, e, s, reg)


def count_members(residuals: np.ndarray, tau: float) -> int:
    return int(np.count_nonzero(residuals <= tau))


def calibrate_tau(data: MaterialDataSet, uset: UncertaintySet, ptilde: int,
                  tau_max: float | None = None, eps_bi: float = EPS_BI) -> UncertaintySet:
    """Bisection for the smallest half-width covering ``ptilde`` data points.

    Returns the set with ``tau`` equal to the final upper end of the
    bracket, so at least ``ptilde`` points are members and ``tau`` is
    within ``eps_bi`` of the smallest such value.
    """
    if not 1 <= ptilde <= data.r:
        raise ValueError(f"ptilde must lie in [1, {data.r}], got {ptilde}")
    if eps_bi <= 0:
        raise ValueError("eps_bi must be positive")
    res = data_residuals(data, uset)
    if tau_max is None:
        tau_max = float(res.max()) * 1.01
    if count_members(res, tau_max) < ptilde:
        raise TauMaxTooSmall(
            f"tau_max = {tau_max:g} covers only {count_members(res, tau_max)} of the "
            f"required {ptilde} points")
    t_max, t_min = float(tau_max), 0.0
    while t_max - t_min >= eps_bi:
        tau = 0.5 * (t_max + t_min)
        if count_members(res, tau) >= ptilde:
            t_max = tau
        else:
            t_min = tau
    return uset.with_tau(t_max, ptilde=int(ptilde), eps_bi=float(eps_bi), bbox=data.bbox())


def calibrate_tau_exact(data: MaterialDataSet, uset: UncertaintySet, ptilde: int) -> float:
    """The ``ptilde``-th smallest data residual: the exact minimal half-width."""
    res = np.sort(data_residuals(data, uset))
    return float(res[ptilde - 1])


def _clip(poly, a, b, c):
    """Part of a convex polygon (list of points) with a*x + b*y <= c."""
    out = []
    n = len(poly)
    for j in range(n):
        p, q = poly[j], poly[(j + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def region_polygon(uset: UncertaintySet, region: int, box) -> list:
    """Vertices (scaled coordinates) of region ``region``'s strip clipped to a raw box.

    ``box`` is (strain lo, strain hi, stress lo, stress hi). Empty list if
    the piece is empty.
    """
    e0, e1, s0, s1 = box
    su = uset.strain_unit
    poly = [(e0 / su, s0), (e1 / su, s0), (e1 / su, s1), (e0 / su, s1)]
    a, b, g = uset.lines[region - 1]
    cuts = [(a, b, g + uset.tau), (-a, -b, -g + uset.tau)]
    if region >= 2:
        p, q, r = uset.seps[region - 1]
        cuts.append((-p, -q, -r))
    if region <= uset.k - 1:
        p, q, r = uset.seps[region]
        cuts.append((p, q, r))
    for cut in cuts:
        poly = _clip(poly, *cut)
        if not poly:
            break
    return poly


def _hull(points):
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def hull_inequalities(uset: UncertaintySet, box, regions=None):
    """Facets ``(a_strain, a_stress, b)`` of the convex hull of the band inside a raw box.

    Each facet reads ``a_strain * strain + a_stress * stress <= b`` in raw
    units. Also returns the regions whose piece is nonempty. A hull with
    fewer than three vertices yields no facets.
    """
    regions = range(1, uset.k + 1) if regions is None else regions
    pts = []
    alive = []
    for i in regions:
        poly = region_polygon(uset, i, box)
        if poly:
            alive.append(i)
            pts.extend(poly)
    hull = _hull(pts)
    facets = []
    if len(hull) >= 3:
        for j in range(len(hull)):
            (x0, y0), (x1, y1) = hull[j], hull[(j + 1) % len(hull)]
            nx, ny = y1 - y0, x0 - x1      # outward for a counter-clockwise hull
            nrm = float(np.hypot(nx, ny))
            if nrm == 0:
                continue
            nx, ny = nx / nrm, ny / nrm
            facets.append((nx / uset.strain_unit, ny, nx * x0 + ny * y0))
    return facets, alive
