"""Loop configuration files (JSON)."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import loops
from .deformations import COORDINATES, ParamPoint
from .errors import GeophaseError
from .position import GridSpec

MODES = ("oscillator", "multiphoton")
PRIMITIVES = ("circle", "lissajous", "polyline")
MAX_LEVEL = 6
MAX_DIM = 512
LOOP_COORDS = COORDINATES + ("m", "omega")


class ConfigError(GeophaseError, ValueError):
    """Invalid configuration, anchored to a line of the source file when possible."""

    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


@dataclass
class LoopConfig:
    base: ParamPoint
    loop: list[dict]
    samples: int
    levels: list[int]
    dim: int
    mode: str = "oscillator"
    grid: GridSpec | None = None
    tolerance: float = 1e-3
    convergence_doublings: int = 1
    raw: dict = field(default_factory=dict)

    def build_loop(self, samples: int | None = None) -> loops.ParamLoop:
        """Materialize the contour, optionally at a different sample count."""
        scale = 1.0 if samples is None else samples / self.samples
        parts = [_build_part(self.base, p, max(1, round(p.get("samples", self.samples) * scale))) for p in self.loop]
        return parts[0] if len(parts) == 1 else loops.concatenate(*parts)

    def state_levels(self) -> list[int]:
        """Fock level indices actually evolved (2n in multiphoton mode)."""
        return [2 * n for n in self.levels] if self.mode == "multiphoton" else list(self.levels)


def _point(base: ParamPoint, spec: dict) -> ParamPoint:
    values = {}
    for key, val in spec.items():
        if key in ("alpha", "beta"):
            re_, im_ = val
            values[key + "1"], values[key + "2"] = float(re_), float(im_)
        elif key in LOOP_COORDS:
            values[key] = float(val)
        else:
            raise KeyError(key)
    return base.replace(**values)


def _build_part(base: ParamPoint, part: dict, samples: int) -> loops.ParamLoop:
    prim = part["primitive"]
    if prim == "circle":
        return loops.circle(base, tuple(part["coords"]), float(part["radius"]), samples, part.get("center"))
    if prim == "lissajous":
        return loops.lissajous(base, part["bindings"], samples)
    verts = [_point(base, v) for v in part["points"]]
    return loops.polyline(verts, samples)


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str, source: str = "<config>") -> LoopConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, source) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object", 1, source)

    def fail(msg: str, key: str):
        raise ConfigError(msg, _line_of(text, key), source)

    mode = raw.get("mode", "oscillator")
    if mode not in MODES:
        fail(f"mode must be one of {MODES}, got {mode!r}", "mode")

    try:
        base = _point(ParamPoint(), raw.get("base", {}))
    except KeyError as exc:
        fail(f"unknown base coordinate {exc.args[0]!r}", "base")
    except (TypeError, ValueError) as exc:
        fail(f"invalid base point: {exc}", "base")

    samples = raw.get("samples", 400)
    if not isinstance(samples, int) or samples < loops.MIN_SEGMENTS:
        fail(f"samples K = {samples} violates K >= {loops.MIN_SEGMENTS}", "samples")

    levels = raw.get("levels", [0, 1])
    if not isinstance(levels, list) or not levels:
        fail("levels must be a non-empty list", "levels")
    if any(not isinstance(n, int) or n < 0 for n in levels) or len(set(levels)) != len(levels):
        fail("levels must be distinct non-negative integers", "levels")
    if max(levels) > MAX_LEVEL:
        fail(f"levels may not exceed {MAX_LEVEL}", "levels")

    dim = raw.get("dim", 80)
    if not isinstance(dim, int) or dim < 2 or dim > MAX_DIM:
        fail(f"dim must be an integer in 2..{MAX_DIM}", "dim")

    tol = raw.get("tolerance", 1e-3)
    if not isinstance(tol, (int, float)) or tol <= 0:
        fail("tolerance must be a positive number", "tolerance")

    doublings = raw.get("convergence_doublings", 1)
    if not isinstance(doublings, int) or not 0 <= doublings <= 3:
        fail("convergence_doublings must be an integer in 0..3", "convergence_doublings")

    grid = None
    if "grid" in raw:
        try:
            grid = GridSpec(**raw["grid"])
        except (TypeError, GeophaseError) as exc:
            fail(f"invalid grid: {exc}", "grid")

    parts = raw.get("loop")
    if parts is None:
        raise ConfigError("missing loop section", None, source)
    if isinstance(parts, dict):
        parts = [parts]
    for part in parts:
        _check_part(part, text, source)

    cfg = LoopConfig(base, parts, samples, list(levels), dim, mode, grid, float(tol), doublings, raw)
    try:
        loop = cfg.build_loop()
    except KeyError as exc:
        fail(f"unknown coordinate {exc.args[0]!r} in loop", "loop")
    except GeophaseError as exc:
        fail(f"invalid loop: {exc}", "loop")
    if mode == "multiphoton" and any(p.alpha != 0 for p in loop.points):
        fail("multiphoton loops must keep alpha = 0", "loop")
    return cfg


def _check_part(part, text: str, source: str) -> None:
    line = _line_of(text, "primitive") or _line_of(text, "loop")
    if not isinstance(part, dict):
        raise ConfigError("each loop part must be an object", line, source)
    prim = part.get("primitive")
    if prim not in PRIMITIVES:
        raise ConfigError(f"primitive must be one of {PRIMITIVES}, got {prim!r}", line, source)
    if "samples" in part and (not isinstance(part["samples"], int) or part["samples"] < loops.MIN_SEGMENTS):
        raise ConfigError(f"samples K = {part['samples']} violates K >= {loops.MIN_SEGMENTS}", _line_of(text, "samples"), source)
    if prim == "circle":
        coords = part.get("coords")
        if not (isinstance(coords, list) and len(coords) == 2 and len(set(coords)) == 2):
            raise ConfigError("circle needs two distinct coords", _line_of(text, "coords") or line, source)
        if any(c not in LOOP_COORDS for c in coords):
            raise ConfigError(f"circle coords must be among {LOOP_COORDS}", _line_of(text, "coords"), source)
        if not isinstance(part.get("radius"), (int, float)):
            raise ConfigError("circle needs a numeric radius", _line_of(text, "radius") or line, source)
    elif prim == "lissajous":
        b = part.get("bindings")
        if not isinstance(b, dict) or not b or any(k not in LOOP_COORDS for k in b):
            raise ConfigError(f"lissajous bindings must map coordinates in {LOOP_COORDS}", _line_of(text, "bindings") or line, source)
    else:
        pts = part.get("points")
        if not isinstance(pts, list) or len(pts) < 3:
            raise ConfigError("polyline needs a list of at least three points", _line_of(text, "points") or line, source)
        if pts[0] != pts[-1]:
            raise ConfigError("polyline point list must be explicitly closed (first == last)", _line_of(text, "points"), source)


def load_config(path: str | Path) -> LoopConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))
