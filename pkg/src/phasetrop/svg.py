"""Minimal hand-written SVG for planar pictures (n = 2 only)."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

SIZE = 480
MARGIN = 20


class Canvas:
    def __init__(self, xlim, ylim, size: int = SIZE):
        self.xlim, self.ylim, self.size = xlim, ylim, size
        self.items: list[str] = []

    def _map(self, x, y):
        s = self.size - 2 * MARGIN
        px = MARGIN + (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0]) * s
        py = MARGIN + (self.ylim[1] - y) / (self.ylim[1] - self.ylim[0]) * s
        return px, py

    def points(self, pts, color="#1f77b4", r=0.8, limit: int = 20000):
        pts = np.asarray(pts, dtype=float)[:limit]
        for x, y in pts:
            px, py = self._map(x, y)
            self.items.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{r}" fill="{color}"/>')

    def segment(self, a, b, color="#d62728", width=1.5):
        (x1, y1), (x2, y2) = self._map(*a), self._map(*b)
        self.items.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{color}" stroke-width="{width}"/>'
        )

    def frame(self):
        (x1, y1), (x2, y2) = self._map(self.xlim[0], self.ylim[1]), self._map(self.xlim[1], self.ylim[0])
        self.items.append(
            f'<rect x="{x1:.2f}" y="{y1:.2f}" width="{x2 - x1:.2f}" height="{y2 - y1:.2f}" fill="none" stroke="#888"/>'
        )

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + self.items + ["</svg>"]) + "\n"

    def save(self, path):
        Path(path).write_text(self.render())


def _check_plane(n):
    if n != 2:
        raise ValueError("SVG output is only available for n = 2")


def draw_curve(canvas: Canvas, Gamma, box, color="#d62728"):
    from .amoeba import hypersurface_segments

    _check_plane(Gamma.ambient_dim)
    for a, b in hypersurface_segments(Gamma, box):
        canvas.segment(a, b, color)


def amoeba_svg(cloud, Gamma=None, box: float = 3.0) -> str:
    log = cloud.log_part().points if cloud.space == "phase" else cloud.points
    _check_plane(log.shape[1])
    c = Canvas((-box, box), (-box, box))
    c.frame()
    c.points(log)
    if Gamma is not None:
        draw_curve(c, Gamma, box)
    return c.render()


def wrapped_segment(canvas: Canvas, a, b, color="#2ca02c"):
    """Draw a segment on the torus [0, 2pi)^2, split where it wraps."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    cuts = [0.0, 1.0]
    for i in range(2):
        if d[i] == 0:
            continue
        lo, hi = sorted((a[i], b[i]))
        k0 = math.floor(lo / (2 * math.pi)) + 1
        k = k0
        while k * 2 * math.pi < hi:
            cuts.append((k * 2 * math.pi - a[i]) / d[i])
            k += 1
    cuts = sorted(set(cuts))
    for s0, s1 in zip(cuts, cuts[1:]):
        p, q = a + s0 * d, a + s1 * d
        mid = (p + q) / 2
        shift = 2 * math.pi * np.floor(mid / (2 * math.pi))
        canvas.segment(p - shift, q - shift, color, width=1.0)


def coamoeba_svg(cloud, lines=()) -> str:
    args = cloud.arg_part().points if cloud.space == "phase" else cloud.points
    _check_plane(args.shape[1])
    c = Canvas((0, 2 * math.pi), (0, 2 * math.pi))
    c.frame()
    c.points(np.mod(args, 2 * math.pi))
    for a, b in lines:
        wrapped_segment(c, a, b)
    return c.render()


def line_coamoeba_boundaries(alpha) -> list:
    """The three families of lines bounding the coamoeba of a line, over one period."""
    a1, a2, a3 = alpha
    P = 2 * math.pi
    out = []
    for k in range(-2, 3):
        c = a1 - a2 + (2 * k + 1) * math.pi
        out.append(((0.0, c), (P, P + c)))
        out.append(((a3 - a1 + (2 * k + 1) * math.pi, 0.0), (a3 - a1 + (2 * k + 1) * math.pi, P)))
        out.append(((0.0, a3 - a2 + (2 * k + 1) * math.pi), (P, a3 - a2 + (2 * k + 1) * math.pi)))
    keep = []
    for a, b in out:
        lo = min(a[0], b[0]), min(a[1], b[1])
        hi = max(a[0], b[0]), max(a[1], b[1])
        if hi[0] >= 0 and lo[0] <= P and hi[1] >= 0 and lo[1] <= P:
            keep.append((a, b))
    return keep


def spine_svg(cloud, Gamma, box: float = 3.0) -> str:
    return amoeba_svg(cloud, Gamma, box) if cloud is not None else curve_svg(Gamma, box)


def curve_svg(Gamma, box: float = 3.0) -> str:
    _check_plane(Gamma.ambient_dim)
    c = Canvas((-box, box), (-box, box))
    c.frame()
    draw_curve(c, Gamma, box)
    for v in Gamma.vertices:
        c.points([[float(a) for a in v.points[0]]], color="#000", r=2.5)
    return c.render()
