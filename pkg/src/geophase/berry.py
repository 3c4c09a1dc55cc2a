"""Berry phases along closed parameter loops.

Numerical phases come from the gauge-invariant overlap product

    gamma = - sum_k arg <psi(R_k) | psi(R_{k+1})>,

and closed forms from line integrals of the analytic one-forms.  Loops are
oriented by listing order; counterclockwise in (alpha1, alpha2) or
(beta1, beta2) counts as positive winding.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from . import deformations as dfm
from .deformations import ParamPoint, sinhc
from .errors import DomainError, PreconditionError, ResolutionError
from .loops import ParamLoop

MIN_OVERLAP = 0.9
DEFAULT_DIM = 80
DEFAULT_TOL = 1e-3

# 4-point Gauss-Legendre nodes/weights on [0, 1] for chord integrals
_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class PhaseReport:
    n: int
    gamma_wilson: float
    gamma_closed: float
    gamma_D: float
    gamma_S: float
    discrepancy: float
    dim: int
    K: int
    converged: bool

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------- numerics


def overlap_phases(columns: Sequence[np.ndarray]) -> np.ndarray:
    """Per-segment contributions -arg<psi_k|psi_{k+1}> for every level.

    ``columns`` holds one (dim, L) array per loop point, the last being the
    stored first array.  Returns a (K, L) array.  Segment arguments are
    reduced in loop order and never folded modulo 2 pi.
    """
    K = len(columns) - 1
    L = columns[0].shape[1]
    out = np.empty((K, L))
    for k in range(K):
        ov = np.einsum("ij,ij->j", columns[k].conj(), columns[k + 1])
        weak = np.abs(ov) < MIN_OVERLAP
        if np.any(weak):
            raise ResolutionError(
                f"segment {k}: overlap modulus {np.abs(ov)[weak].min():.3f} < {MIN_OVERLAP}; refine the loop"
            )
        out[k] = -np.angle(ov)
    return out


def loop_states(
    loop: ParamLoop,
    state_fn: Callable[[ParamPoint], np.ndarray],
) -> list[np.ndarray]:
    """Evaluate ``state_fn`` at each distinct loop point; reuse the first at the end."""
    cache: dict[int, np.ndarray] = {}
    states = []
    for p in loop.points[:-1]:
        key = id(p)
        if key not in cache:
            cache[key] = state_fn(p)
        states.append(cache[key])
    states.append(states[0])
    return states


def oscillator_state_fn(levels: Sequence[int], dim: int, tail_tol: float = dfm.DEFAULT_TAIL_TOL):
    levels = list(levels)

    def fn(R: ParamPoint) -> np.ndarray:
        return np.stack([s.amplitudes for s in dfm.eigenstates(levels, R, dim, tail_tol)], axis=1)

    return fn


def wilson_segments(levels: Sequence[int], loop: ParamLoop, dim: int = DEFAULT_DIM) -> np.ndarray:
    """(K, len(levels)) per-segment phase contributions for the oscillator states."""
    return overlap_phases(loop_states(loop, oscillator_state_fn(levels, dim)))


def wilson_loop_phases(levels: Sequence[int], loop: ParamLoop, dim: int = DEFAULT_DIM) -> np.ndarray:
    return wilson_segments(levels, loop, dim).sum(axis=0)


def wilson_loop_phase(n: int, loop: ParamLoop, dim: int = DEFAULT_DIM) -> float:
    """Discrete Berry phase of |n, R> around ``loop``."""
    return float(wilson_loop_phases([n], loop, dim)[0])


# -------------------------------------------------------------- closed forms


def one_form_segments(loop: ParamLoop, form: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Integrals of a one-form over each straight chord of the loop, shape (K,).

    ``form`` maps an (M, 5) array of (lam, alpha1, alpha2, beta1, beta2) to the
    (M, 5) array of its components.  Each chord uses 4-point Gauss-Legendre.
    """
    x = loop.coordinates()
    d = np.diff(x, axis=0)
    out = np.zeros(len(d))
    for t, w in zip(_GL_X, _GL_W):
        out += w * np.sum(form(x[:-1] + t * d) * d, axis=1)
    return out


def integrate_one_form(loop: ParamLoop, form: Callable[[np.ndarray], np.ndarray]) -> float:
    """Line integral of a one-form along the loop chords."""
    return float(one_form_segments(loop, form).sum())


def displacement_form(x: np.ndarray) -> np.ndarray:
    a1, a2 = x[:, 1], x[:, 2]
    out = np.zeros_like(x)
    out[:, 0] = -a1 * a2
    out[:, 1] = a2
    out[:, 2] = -a1
    return out


def _sinhc(b: np.ndarray) -> np.ndarray:
    return np.array([sinhc(v) for v in b])


def squeeze_form(x: np.ndarray) -> np.ndarray:
    """Squeeze one-form per unit weight (n + 1/2); finite through beta = 0."""
    b1, b2 = x[:, 3], x[:, 4]
    r = np.hypot(b1, b2)
    sc = _sinhc(r)
    out = np.zeros_like(x)
    out[:, 0] = -b2 * sc * np.cosh(r)
    out[:, 3] = sc * sc * b2
    out[:, 4] = -sc * sc * b1
    return out


def arg_beta_form(x: np.ndarray) -> np.ndarray:
    """sinh^2|beta| d(arg beta) written in (beta1, beta2)."""
    b1, b2 = x[:, 3], x[:, 4]
    r2 = b1 * b1 + b2 * b2
    if np.any(r2 == 0.0):
        raise DomainError("arg(beta) is undefined at beta = 0")
    s2 = np.sinh(np.sqrt(r2)) ** 2
    out = np.zeros_like(x)
    out[:, 3] = -s2 * b2 / r2
    out[:, 4] = s2 * b1 / r2
    return out


def closed_form_displacement_phase(loop: ParamLoop) -> float:
    """Displacement part of the phase; the same for every level."""
    return integrate_one_form(loop, displacement_form)


def closed_form_squeeze_phase(n: int, loop: ParamLoop) -> float:
    return (n + 0.5) * integrate_one_form(loop, squeeze_form)


def arg_beta_phase(n: int, loop: ParamLoop) -> float:
    """-(n + 1/2) times the integral of sinh^2|beta| d(arg beta).

    Only for loops with constant alpha and lam that avoid beta = 0.
    """
    x = loop.coordinates()
    if np.ptp(x[:, 0]) > 0 or np.ptp(x[:, 1]) > 0 or np.ptp(x[:, 2]) > 0:
        raise PreconditionError("arg-beta form requires constant alpha and lam along the loop")
    if np.any(np.hypot(x[:, 3], x[:, 4]) == 0.0):
        raise DomainError("loop touches beta = 0 where arg(beta) is undefined")
    # chords of the loop may still pass through the origin
    d = np.diff(x[:, 3:5], axis=0)
    cross = x[:-1, 3] * d[:, 1] - x[:-1, 4] * d[:, 0]
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = -np.einsum("ij,ij->i", x[:-1, 3:5], d) / dd
    if np.any((cross == 0.0) & (dd > 0) & (t > 0) & (t < 1)):
        raise DomainError("a loop chord passes through beta = 0")
    return -(n + 0.5) * integrate_one_form(loop, arg_beta_form)


# ------------------------------------------------------------------ reports


def total_phase(
    n: int,
    loop: ParamLoop,
    dim: int = DEFAULT_DIM,
    tol: float = DEFAULT_TOL,
    gamma_wilson: float | None = None,
) -> PhaseReport:
    gD = closed_form_displacement_phase(loop)
    gS = closed_form_squeeze_phase(n, loop)
    gc = gD + gS
    gw = wilson_loop_phase(n, loop, dim) if gamma_wilson is None else float(gamma_wilson)
    disc = abs(gw - gc)
    return PhaseReport(int(n), gw, gc, gD, gS, disc, int(dim), loop.segments, bool(disc <= tol))


def phase_reports(
    levels: Sequence[int],
    loop: ParamLoop,
    dim: int = DEFAULT_DIM,
    tol: float = DEFAULT_TOL,
) -> list[PhaseReport]:
    gammas = wilson_loop_phases(levels, loop, dim)
    return [total_phase(n, loop, dim, tol, g) for n, g in zip(levels, gammas)]


def hannay_angle(loop: ParamLoop, dim: int = DEFAULT_DIM) -> float:
    """Classical angle shift gamma_0 - gamma_1 from the numerical phases."""
    g0, g1 = wilson_loop_phases([0, 1], loop, dim)
    return float(g0 - g1)


def linear_fit_residual(levels: Sequence[int], gammas: Sequence[float]) -> float:
    n = np.asarray(levels, dtype=float)
    g = np.asarray(gammas, dtype=float)
    coef = np.polyfit(n, g, 1)
    return float(np.max(np.abs(np.polyval(coef, n) - g)))


def linearity_check(loop: ParamLoop, n_max: int = 4, dim: int = DEFAULT_DIM) -> float:
    """Largest deviation of the numerical gamma_n (n = 0..n_max) from their best line."""
    if not 1 <= n_max <= 6:
        raise PreconditionError(f"n_max must lie in 1..6, got {n_max}")
    levels = list(range(n_max + 1))
    return linear_fit_residual(levels, wilson_loop_phases(levels, loop, dim))


def curvature_at(R: ParamPoint, plane: str, n: int = 0) -> float:
    """Berry curvature in the (alpha1, alpha2) or (beta1, beta2) plane at fixed lam."""
    if plane == "alpha":
        return -2.0
    if plane == "beta":
        b = abs(R.beta)
        if b == 0.0:
            raise DomainError("beta-plane curvature is singular at beta = 0")
        return -(n + 0.5) * math.sinh(2.0 * b) / b
    raise PreconditionError(f"unknown plane {plane!r}; expected 'alpha' or 'beta'")
