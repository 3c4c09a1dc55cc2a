"""Closed, discretized contours in parameter space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .deformations import ParamPoint
from .errors import PreconditionError

MIN_SEGMENTS = 16
MAX_STEP = 0.2


@dataclass(frozen=True)
class ParamLoop:
    """K + 1 ordered points whose last entry is the very object stored first.

    Orientation is the listing order.  ``metadata`` records how the loop was
    generated (primitive name and its parameters).
    """

    points: tuple[ParamPoint, ...]
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) - 1 < MIN_SEGMENTS:
            raise PreconditionError(f"loop needs K >= {MIN_SEGMENTS} segments, got K = {len(pts) - 1}")
        if pts[-1] is not pts[0]:
            raise PreconditionError("loop is not closed: last point must be the stored first point")
        steps = np.abs(np.diff(self.coordinates(), axis=0))
        worst = float(steps.max(initial=0.0))
        if worst >= MAX_STEP:
            k = int(np.argmax(steps.max(axis=1)))
            raise PreconditionError(f"segment {k} has coordinate step {worst:.3g} >= {MAX_STEP}")

    @property
    def segments(self) -> int:
        return len(self.points) - 1

    def coordinates(self) -> np.ndarray:
        """(K+1, 5) array of (lam, alpha1, alpha2, beta1, beta2)."""
        return np.array([p.coords() for p in self.points])

    def reversed(self) -> "ParamLoop":
        pts = [self.points[0]] + list(reversed(self.points[1:-1]))
        return ParamLoop(tuple(pts) + (pts[0],), {**self.metadata, "reversed": True})


def _close(points: list[ParamPoint], metadata: dict) -> ParamLoop:
    return ParamLoop(tuple(points) + (points[0],), metadata)


def constant_loop(base: ParamPoint, segments: int = MIN_SEGMENTS) -> ParamLoop:
    return _close([base] * segments, {"primitive": "constant"})


def circle(
    base: ParamPoint,
    coords: Sequence[str] = ("alpha1", "alpha2"),
    radius: float = 0.5,
    segments: int = 400,
    center: Sequence[float] | None = None,
) -> ParamLoop:
    """Counterclockwise circle in the plane of two named coordinates.

    ``center`` defaults to the base point's values of those coordinates.
    """
    x, y = coords
    if x == y:
        raise PreconditionError("circle coordinates must be distinct")
    if center is None:
        center = (base.coord(x), base.coord(y))
    cx, cy = center
    t = 2.0 * np.pi * np.arange(segments) / segments
    pts = [base.replace(**{x: cx + radius * math.cos(s), y: cy + radius * math.sin(s)}) for s in t]
    meta = {"primitive": "circle", "coords": [x, y], "radius": radius, "center": [cx, cy], "segments": segments}
    return _close(pts, meta)


def lissajous(base: ParamPoint, bindings: Mapping[str, Mapping], segments: int = 400) -> ParamLoop:
    """Each bound coordinate follows center + amplitude * cos(frequency * t + phase).

    Frequencies must be integers so the curve closes after t = 2 pi.
    """
    if not bindings:
        raise PreconditionError("lissajous loop needs at least one coordinate binding")
    spec = {}
    for name, b in bindings.items():
        freq = b.get("frequency", 1)
        if int(freq) != freq:
            raise PreconditionError(f"frequency of {name} must be an integer, got {freq}")
        spec[name] = (
            float(b.get("center", base.coord(name))),
            float(b.get("amplitude", 0.0)),
            int(freq),
            float(b.get("phase", 0.0)),
        )
    t = 2.0 * np.pi * np.arange(segments) / segments
    pts = [base.replace(**{k: c + A * math.cos(f * s + ph) for k, (c, A, f, ph) in spec.items()}) for s in t]
    meta = {"primitive": "lissajous", "bindings": {k: dict(v) for k, v in bindings.items()}, "segments": segments}
    return _close(pts, meta)


def circle_pair(
    base: ParamPoint,
    alpha_radius: float,
    beta_radius: float,
    segments: int = 400,
) -> ParamLoop:
    """alpha and beta traverse counterclockwise circles about the base values in lockstep."""
    a0, b0 = base.alpha, base.beta
    bindings = {
        "alpha1": {"center": a0.real, "amplitude": alpha_radius},
        "alpha2": {"center": a0.imag, "amplitude": alpha_radius, "phase": -math.pi / 2},
        "beta1": {"center": b0.real, "amplitude": beta_radius},
        "beta2": {"center": b0.imag, "amplitude": beta_radius, "phase": -math.pi / 2},
    }
    return lissajous(base, bindings, segments)


def polyline(vertices: Sequence[ParamPoint], segments: int) -> ParamLoop:
    """Closed polygon through ``vertices`` (first == last), about ``segments`` steps in total.

    Each edge gets a share of the segments proportional to its length in
    (lam, alpha1, alpha2, beta1, beta2), at least one and enough to respect
    the step bound.
    """
    verts = list(vertices)
    if len(verts) < 3:
        raise PreconditionError("polyline needs at least two distinct vertices plus the closing one")
    if not np.array_equal(verts[0].coords(), verts[-1].coords()) or verts[0].m != verts[-1].m:
        raise PreconditionError("polyline vertex list must be explicitly closed (first == last)")
    xs = np.array([v.coords() for v in verts])
    lengths = np.linalg.norm(np.diff(xs, axis=0), axis=1)
    total = lengths.sum()
    if total == 0.0:
        return constant_loop(verts[0], segments)
    pts: list[ParamPoint] = []
    for i, L in enumerate(lengths):
        d = xs[i + 1] - xs[i]
        count = max(1, int(round(segments * L / total)), int(math.ceil(np.abs(d).max() / (0.5 * MAX_STEP))))
        m0, m1 = verts[i].m, verts[i + 1].m
        for j in range(count):
            s = j / count
            if j == 0:
                pts.append(verts[i])
                continue
            x = xs[i] + s * d
            m = m0 + s * (m1 - m0)
            pts.append(ParamPoint.from_coords(*x, m=m))
    meta = {"primitive": "polyline", "vertices": [v.coords().tolist() for v in verts], "segments": len(pts)}
    return _close(pts, meta)


def concatenate(*parts: ParamLoop) -> ParamLoop:
    """Traverse the given loops one after another.

    Every part must start at the same parameter values; the composite keeps a
    single stored start point so closure holds by identity.
    """
    if not parts:
        raise PreconditionError("nothing to concatenate")
    start = parts[0].points[0]
    pts: list[ParamPoint] = []
    for part in parts:
        first = part.points[0]
        if not (np.array_equal(first.coords(), start.coords()) and first.m == start.m):
            raise PreconditionError("concatenated loops must share their start point")
        pts.append(start)
        pts.extend(part.points[1:-1])
    meta = {"primitive": "concatenation", "parts": [dict(p.metadata) for p in parts], "segments": len(pts)}
    return _close(pts, meta)


def composed_circles(base: ParamPoint, alpha_radius: float, beta_radius: float, segments: int = 400) -> ParamLoop:
    """A counterclockwise alpha-circle followed by a counterclockwise beta-circle.

    Both circles are centred on the origin and start at alpha = alpha_radius,
    beta = beta_radius; ``segments`` is split evenly between them.
    """
    start = base.replace(alpha1=alpha_radius, alpha2=0.0, beta1=beta_radius, beta2=0.0)
    half = segments // 2
    first = circle(start, ("alpha1", "alpha2"), alpha_radius, half, center=(0.0, 0.0))
    second = circle(start, ("beta1", "beta2"), beta_radius, segments - half, center=(0.0, 0.0))
    return concatenate(first, second)
