"""Minimal SVG output: data scatter over the band, bounds against load factor.

Only ``<circle>``, ``<rect>``, ``<polyline>``, ``<line>`` and ``<text>``
are emitted. In a scatter every data point is one ``<circle>``, every band
edge one ``<polyline class="band">`` (two per region) and every separator
one ``<line class="sep">``; member states are ``<rect>`` marks. In a
bounds plot the reference values are the only circles.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .segfit import MaterialDataSet
from .uncertainty import UncertaintySet

__all__ = ["Frame", "scatter_svg", "bounds_svg", "band_edges", "separator_segments"]

W, H = 640, 480
PAD_L, PAD_R, PAD_T, PAD_B = 72, 20, 36, 52


@dataclass(frozen=True)
class Frame:
    x0: float
    x1: float
    y0: float
    y1: float

    @classmethod
    def around(cls, xs, ys, margin=0.05):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        x0, x1 = float(xs.min()), float(xs.max())
        y0, y1 = float(ys.min()), float(ys.max())
        dx = (x1 - x0) or max(abs(x0), 1.0)
        dy = (y1 - y0) or max(abs(y0), 1.0)
        return cls(x0 - margin * dx, x1 + margin * dx, y0 - margin * dy, y1 + margin * dy)

    def px(self, x, y):
        fx = (np.asarray(x, dtype=float) - self.x0) / (self.x1 - self.x0)
        fy = (np.asarray(y, dtype=float) - self.y0) / (self.y1 - self.y0)
        return (PAD_L + fx * (W - PAD_L - PAD_R), H - PAD_B - fy * (H - PAD_T - PAD_B))


def _f(v) -> str:
    return f"{float(v):.2f}"


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def _axes(fr: Frame, xlabel, ylabel, title, xscale=1.0):
    out = [f'<rect x="{PAD_L}" y="{PAD_T}" width="{W - PAD_L - PAD_R}" '
           f'height="{H - PAD_T - PAD_B}" fill="none" stroke="black"/>']
    for xv in _ticks(fr.x0, fr.x1):
        x, _ = fr.px(xv, fr.y0)
        out.append(f'<text x="{_f(x)}" y="{H - PAD_B + 16}" text-anchor="middle" '
                   f'font-size="11">{xv * xscale:.3g}</text>')
    for yv in _ticks(fr.y0, fr.y1):
        _, y = fr.px(fr.x0, yv)
        out.append(f'<text x="{PAD_L - 6}" y="{_f(y + 4)}" text-anchor="end" '
                   f'font-size="11">{yv:.3g}</text>')
    out.append(f'<text x="{(PAD_L + W - PAD_R) / 2}" y="{H - 12}" text-anchor="middle" '
               f'font-size="13">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{(PAD_T + H - PAD_B) / 2}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {(PAD_T + H - PAD_B) / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">'
                   f'{escape(title)}</text>')
    return out


def _document(body, timestamp=None) -> str:
    head = ['<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">']
    if timestamp is not None:
        head.append(f"<!-- generated: {escape(str(timestamp))} -->")
    return "\n".join(head + list(body) + ["</svg>"]) + "\n"


def _clip_line(n, c, halfplanes, box):
    """Segment of ``n . x = c`` inside ``box`` and ``a . x <= b`` for each (a, b)."""
    n = np.asarray(n, dtype=float)
    x0 = n * c / float(n @ n)
    d = np.array([-n[1], n[0]])
    lo, hi = -np.inf, np.inf
    e0, e1, s0, s1 = box
    cons = list(halfplanes) + [((-1.0, 0.0), -e0), ((1.0, 0.0), e1),
                               ((0.0, -1.0), -s0), ((0.0, 1.0), s1)]
    for a, b in cons:
        a = np.asarray(a, dtype=float)
        ad = float(a @ d)
        slack = b - float(a @ x0)
        if abs(ad) < 1e-15:
            if slack < 0:
                return None
            continue
        t = slack / ad
        if ad > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
    if not lo < hi:
        return None
    return x0 + lo * d, x0 + hi * d


def _region_halfplanes(uset: UncertaintySet, i: int):
    """Separator constraints of 0-based region i as (a, b) with a . x <= b (scaled coords)."""
    S = uset.seps
    hp = []
    if i > 0:
        hp.append(((-S[i, 0], -S[i, 1]), -S[i, 2]))
    if i < uset.k - 1:
        hp.append(((S[i + 1, 0], S[i + 1, 1]), S[i + 1, 2]))
    return hp


def band_edges(uset: UncertaintySet, box) -> list:
    """Raw-coordinate segments of the lines at +-tau, each clipped to its region and ``box``.

    ``box`` is (strain_lo, strain_hi, stress_lo, stress_hi) in raw units.
    Returns ``[(region, side, ((e0, s0), (e1, s1)))]`` for edges that are visible.
    """
    su = uset.strain_unit
    sbox = (box[0] / su, box[1] / su, box[2], box[3])
    out = []
    for i in range(uset.k):
        a, b, g = uset.lines[i]
        hp = _region_halfplanes(uset, i)
        for side in (-1, 1):
            seg = _clip_line((a, b), g + side * uset.tau, hp, sbox)
            if seg is not None:
                p, q = seg
                out.append((i + 1, side, ((p[0] * su, p[1]), (q[0] * su, q[1]))))
    return out


def separator_segments(uset: UncertaintySet, box) -> list:
    su = uset.strain_unit
    sbox = (box[0] / su, box[1] / su, box[2], box[3])
    out = []
    for i in range(1, uset.k):
        p, q, r = uset.seps[i]
        seg = _clip_line((p, q), r, [], sbox)
        if seg is not None:
            a, b = seg
            out.append((i, ((a[0] * su, a[1]), (b[0] * su, b[1]))))
    return out


def scatter_svg(data: MaterialDataSet | None, uset: UncertaintySet | None, title: str = "",
                states=None, frame: Frame | None = None, timestamp=None) -> str:
    """Data points, band edges at +-tau and separators, optionally member states.

    ``states`` is a list of (label, eps array, sigma array); their points are squares.
    """
    xs, ys = [], []
    if data is not None:
        xs.append(data.strain)
        ys.append(data.stress)
    for _, e, s in states or ():
        xs.append(np.asarray(e, dtype=float))
        ys.append(np.asarray(s, dtype=float))
    if frame is None:
        if not xs:
            raise ValueError("nothing to plot")
        frame = Frame.around(np.concatenate(xs), np.concatenate(ys))
    box = (frame.x0, frame.x1, frame.y0, frame.y1)
    body = _axes(frame, "strain (x 1e-3)", "stress (MPa)", title, xscale=1e3)
    if uset is not None:
        for region, side, ((e0, s0), (e1, s1)) in band_edges(uset, box):
            (x0, x1), (y0, y1) = frame.px([e0, e1], [s0, s1])
            body.append(f'<polyline class="band" data-region="{region}" data-side="{side:+d}" '
                        f'points="{_f(x0)},{_f(y0)} {_f(x1)},{_f(y1)}" fill="none" '
                        f'stroke="#1f5fa8" stroke-width="1.2"/>')
        for i, ((e0, s0), (e1, s1)) in separator_segments(uset, box):
            (x0, x1), (y0, y1) = frame.px([e0, e1], [s0, s1])
            body.append(f'<line class="sep" data-index="{i}" x1="{_f(x0)}" y1="{_f(y0)}" '
                        f'x2="{_f(x1)}" y2="{_f(y1)}" stroke="#888" stroke-dasharray="4 3"/>')
    if data is not None:
        X, Y = frame.px(data.strain, data.stress)
        for x, y in zip(X, Y):
            body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2" fill="#444"/>')
    colors = ["#c0392b", "#27ae60", "#8e44ad", "#d35400"]
    for n, (label, e, s) in enumerate(states or ()):
        X, Y = frame.px(e, s)
        col = colors[n % len(colors)]
        for x, y in zip(np.atleast_1d(X), np.atleast_1d(Y)):
            body.append(f'<rect class="state" data-label="{escape(str(label))}" '
                        f'x="{_f(x - 3)}" y="{_f(y - 3)}" width="6" height="6" fill="{col}"/>')
    return _document(body, timestamp)


def bounds_svg(lams, lower, upper, reference=None, qlabel: str = "q", title: str = "",
               timestamp=None) -> str:
    """Lower and upper bounds against load factor; ``reference`` values as circles.

    Missing bounds (NaN) break the polylines.
    """
    lams = np.asarray(lams, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    ref = None if reference is None else np.asarray(reference, dtype=float)
    vals = [v[np.isfinite(v)] for v in (lower, upper) + (() if ref is None else (ref,))]
    ys = np.concatenate(vals) if any(v.size for v in vals) else np.zeros(1)
    frame = Frame.around(np.concatenate([lams, [0.0]]), np.concatenate([ys, [0.0]]))
    body = _axes(frame, "load factor", qlabel, title)
    for name, arr, col in (("lower", lower, "#1f5fa8"), ("upper", upper, "#c0392b")):
        ok = np.isfinite(arr)
        runs = np.split(np.arange(arr.size), np.flatnonzero(np.diff(ok.astype(int))) + 1)
        for run in runs:
            if run.size == 0 or not ok[run[0]]:
                continue
            X, Y = frame.px(lams[run], arr[run])
            pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(X, Y))
            body.append(f'<polyline class="{name}" points="{pts}" fill="none" stroke="{col}" '
                        f'stroke-width="1.5"/>')
    if ref is not None:
        X, Y = frame.px(lams, ref)
        for x, y, v in zip(X, Y, ref):
            if np.isfinite(v):
                body.append(f'<circle class="reference" cx="{_f(x)}" cy="{_f(y)}" r="3" '
                            f'fill="black"/>')
    return _document(body, timestamp)
