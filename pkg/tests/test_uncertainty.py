import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from segbound.datagen import gen_data, ground_truth
from segbound.errors import DegenerateLine, NonMonotoneBreakpoints, ParallelLines
from segbound.segfit import LineParams, SegmentedFit, segment_dp
from segbound.uncertainty import (admissible_regions, breakpoints, build_geometry, calibrate_tau,
                                  calibrate_tau_exact, contains, count_members, data_residuals,
                                  hull_inequalities, normalize_lines, region_of, region_polygon,
                                  regions_of, separators)


def slope_line(m, c):
    """stress = m * strain + c as (alpha, beta, gamma) with beta = 1."""
    return LineParams(-m, 1.0, c)


def fit_of(lines):
    return SegmentedFit(lines=list(lines), breaks=list(range(1, len(lines))), sq_error=0.0,
                        penalty=0.0, objective=0.0, k=len(lines), mu=0.0)


PAIR = [slope_line(1.0, 0.0), slope_line(2.0, -1.0)]      # stress = strain, stress = 2 strain - 1


def test_normalization_unit_normal():
    for ln in normalize_lines(PAIR):
        assert ln.alpha ** 2 + ln.beta ** 2 == pytest.approx(1.0, abs=1e-12)
        assert ln.alpha < 0 < ln.beta
    a, b, g = normalize_lines([LineParams(2.0, -2.0, 4.0)])[0].as_tuple()
    assert (a, b, g) == pytest.approx((-2 ** -0.5, 2 ** -0.5, -2 * 2 ** -0.5))


def test_normalization_strain_unit():
    # stress = 2000 strain in raw units is stress = 2 e with e = strain / 1e-3
    a, b, g = normalize_lines([slope_line(2000.0, 1.0)], strain_unit=1e-3)[0].as_tuple()
    assert -a / b == pytest.approx(2.0) and g / b == pytest.approx(1.0)


def test_normalization_rejects_bad_slopes():
    with pytest.raises(DegenerateLine):
        normalize_lines([slope_line(-1.0, 0.0)])
    with pytest.raises(DegenerateLine):
        normalize_lines([LineParams(1.0, 0.0, 1.0)])
    assert normalize_lines([slope_line(-1.0, 0.0)], allow_nonpositive_slope=True)[0].alpha > 0


def test_breakpoint_of_pair():
    bps = breakpoints(normalize_lines(PAIR))
    assert bps == pytest.approx(np.array([[1.0, 1.0]]), abs=1e-12)


def test_breakpoint_vs_linear_solve(rng):
    for _ in range(20):
        m1, m2 = rng.uniform(0.1, 5, 2)
        c1, c2 = rng.normal(size=2)
        if abs(m1 - m2) < 0.05:
            continue
        bp = breakpoints(normalize_lines([slope_line(m1, c1), slope_line(m2, c2)]))[0]
        oracle = np.linalg.solve([[-m1, 1.0], [-m2, 1.0]], [c1, c2])
        assert bp == pytest.approx(oracle, abs=1e-10)


def test_parallel_lines():
    with pytest.raises(ParallelLines) as info:
        breakpoints(normalize_lines([PAIR[0], PAIR[0], PAIR[1]]))
    assert info.value.index == 1


def test_separator_of_pair():
    mpmath.mp.dps = 30
    p = -1 / mpmath.sqrt(2) + 2 / mpmath.sqrt(5)
    q = 1 / mpmath.sqrt(2) - 1 / mpmath.sqrt(5)
    geom = build_geometry(fit_of(PAIR))
    assert geom.seps[1] == pytest.approx([float(p), float(q), float(p + q)], abs=1e-14)
    # the documented example values, to their printed accuracy
    assert geom.seps[1] == pytest.approx([0.18734, 0.25996, 0.44730], abs=1e-3)
    assert np.all(geom.seps[0] == 0) and np.all(geom.seps[-1] == 0)


def test_single_line_sentinels():
    geom = build_geometry(fit_of([slope_line(1.0, 0.0)]))
    assert geom.seps.shape == (2, 3) and not geom.seps.any()
    assert region_of((5.0, -3.0), geom) == 1


@given(st.lists(st.floats(0.1, 5.0), min_size=2, max_size=5, unique=True),
       st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_separator_passes_through_breakpoint(slopes, intercepts):
    lines = [slope_line(m, c) for m, c in zip(slopes, intercepts)]
    L = np.array([ln.as_tuple() for ln in normalize_lines(lines)])
    try:
        bps = breakpoints(L)
    except ParallelLines:
        return
    S = separators(L, bps)
    for i in range(1, len(lines)):
        p, q, r = S[i]
        assert r == pytest.approx(p * bps[i - 1, 0] + q * bps[i - 1, 1], abs=1e-12)
        # and through the corners of the lines shifted by +-tau
        for tau in (0.1, 1.0):
            for side in (-1, 1):
                A = L[i - 1:i + 1, :2]
                corner = np.linalg.solve(A, L[i - 1:i + 1, 2] + side * tau)
                assert p * corner[0] + q * corner[1] == pytest.approx(r, abs=1e-9)


def test_nonmonotone_breakpoints_rejected():
    # breakpoints at strain 1 then strain -1
    lines = [slope_line(1.0, 0.0), slope_line(2.0, -1.0), slope_line(3.0, 1.0)]
    with pytest.raises(NonMonotoneBreakpoints):
        build_geometry(fit_of(lines))


def test_region_tie_goes_to_smaller_index():
    geom = build_geometry(fit_of(PAIR))
    p, q, r = geom.seps[1]
    # a point exactly on the separator through (1, 1)
    pt = (1.0 + 4 * q, 1.0 - 4 * p)
    assert p * pt[0] + q * pt[1] == pytest.approx(r, abs=1e-12)
    assert region_of((1.0, 1.0), geom) == 1
    assert region_of((0.0, 0.0), geom) == 1 and region_of((3.0, 5.0), geom) == 2


def _side_oracle(L, bps, i, point):
    """Which side of the bisector between lines i and i+1 (0-based) the point is on,
    decided by comparing with a reference point far along line i on the low-strain side."""
    n1, n2 = L[i, :2], L[i + 1, :2]
    g1, g2 = L[i, 2], L[i + 1, 2]

    def h(x):
        return (n1 @ x - g1) - (n2 @ x - g2)

    direction = np.array([n1[1], -n1[0]])
    if direction[0] > 0:
        direction = -direction
    ref = bps[i] + 10.0 * direction
    return np.sign(h(np.asarray(point))) == np.sign(h(ref)) or h(np.asarray(point)) == 0


def _membership_oracle(L, bps, tau, point):
    k = L.shape[0]
    x = np.asarray(point)
    for i in range(k):
        left_ok = i == 0 or not _side_oracle(L, bps, i - 1, x)
        right_ok = i == k - 1 or _side_oracle(L, bps, i, x)
        if left_ok and right_ok:
            return abs(L[i, :2] @ x - L[i, 2]) <= tau
    raise AssertionError("no region")


@pytest.mark.parametrize("material", ["tri-modulus", "cables", "struts"])
def test_membership_brute_force(material):
    gt = ground_truth(material)
    data = gen_data(gt["law"], gt["r"], gt["noise"], gt["strain_range"], 0)
    geom = build_geometry(segment_dp(data, 5, 2.0), strain_unit=1e-3).with_tau(0.4)
    rng = np.random.default_rng(7)
    lo, hi = gt["strain_range"]
    pts = np.column_stack([rng.uniform(lo, hi, 1000), np.zeros(1000)])
    pts[:, 1] = gt["law"].stress(pts[:, 0]) + rng.uniform(-1.5, 1.5, 1000)
    got = [contains(p, geom) for p in pts]
    want = [_membership_oracle(geom.lines, geom.breakpoints, geom.tau, (p[0] / 1e-3, p[1]))
            for p in pts]
    assert got == want
    assert 100 < sum(got) < 1000


@given(st.integers(0, 10**6))
def test_regions_tile_the_plane(seed):
    rng = np.random.default_rng(seed)
    slopes = np.sort(rng.uniform(0.2, 4.0, 3))
    if np.min(np.diff(slopes)) < 0.05:
        return
    # continuous law through chosen breakpoints gives monotone breakpoints
    u = np.sort(rng.uniform(-2, 2, 2))
    if u[1] - u[0] < 0.1:
        return
    c0 = rng.normal()
    c1 = c0 + (slopes[0] - slopes[1]) * u[0]
    c2 = c1 + (slopes[1] - slopes[2]) * u[1]
    geom = build_geometry(fit_of([slope_line(m, c) for m, c in zip(slopes, (c0, c1, c2))]))
    pts = rng.uniform(-6, 6, (200, 2))
    for p in pts:
        adm = admissible_regions(p, geom)
        assert adm, "point unclassified"
        assert region_of(p, geom) == adm[0]
    # along the law the region is the segment index
    e = np.linspace(-4, 4, 81)
    law = np.where(e < u[0], slopes[0] * e + c0, np.where(e < u[1], slopes[1] * e + c1,
                                                          slopes[2] * e + c2))
    want = 1 + (e > u[0]).astype(int) + (e > u[1]).astype(int)
    assert list(regions_of(geom, e, law)) == list(want)


def _tri_modulus(seed, r=200):
    gt = ground_truth("tri-modulus")
    data = gen_data(gt["law"], r, gt["noise"], gt["strain_range"], seed)
    return data, build_geometry(segment_dp(data, 5, 2.0), strain_unit=1e-3)


@pytest.mark.parametrize("seed", range(50))
def test_calibration_matches_sorted_residual(seed):
    data, geom = _tri_modulus(seed, r=60)
    p = 1 + seed % 60
    eps_bi = 1e-7
    u = calibrate_tau(data, geom, p, eps_bi=eps_bi)
    exact = np.sort(data_residuals(data, geom))
    assert abs(u.tau - exact[p - 1]) <= eps_bi
    assert u.tau >= exact[p - 1]
    res = data_residuals(data, geom)
    assert count_members(res, u.tau) >= p
    if p == 1 or exact[p - 1] > exact[p - 2]:
        assert count_members(res, u.tau - eps_bi) < p
    assert calibrate_tau_exact(data, geom, p) == exact[p - 1]


def test_calibration_all_points():
    data, geom = _tri_modulus(3)
    u = calibrate_tau(data, geom, data.r)
    assert u.tau == pytest.approx(data_residuals(data, geom).max(), abs=1e-7)
    assert all(contains(pt, u) for pt in zip(data.strain, data.stress))


def test_calibration_arguments():
    data, geom = _tri_modulus(3, r=20)
    with pytest.raises(ValueError):
        calibrate_tau(data, geom, 0)
    with pytest.raises(ValueError):
        calibrate_tau(data, geom, 21)
    from segbound.errors import TauMaxTooSmall
    with pytest.raises(TauMaxTooSmall):
        calibrate_tau(data, geom, 20, tau_max=1e-9)


def test_region_polygon_and_hull_contain_members():
    data, geom = _tri_modulus(1)
    u = calibrate_tau(data, geom, 186)
    box = (-6e-3, 6e-3, -20.0, 20.0)
    facets, alive = hull_inequalities(u, box)
    assert alive == [1, 2, 3] and len(facets) >= 3
    rng = np.random.default_rng(0)
    for _ in range(2000):
        pt = (rng.uniform(*box[:2]), rng.uniform(*box[2:]))
        if contains(pt, u):
            for a, b, c in facets:
                assert a * pt[0] + b * pt[1] <= c + 1e-9
            i = region_of(pt, u)
            poly = np.array(region_polygon(u, i, box))
            # point inside the convex piece: all cross products share a sign
            e = np.array([pt[0] / 1e-3, pt[1]])
            cr = []
            for j in range(len(poly)):
                d, w = poly[j + 1 - len(poly)] - poly[j], e - poly[j]
                cr.append(d[0] * w[1] - d[1] * w[0])
            assert min(cr) >= -1e-9 or max(cr) <= 1e-9
