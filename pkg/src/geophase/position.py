"""Position-grid realization of the deformed oscillator ground state.

Grid states are stored as ``sqrt(h) * psi(x_i)`` so that plain vector inner
products approximate the L2 integrals (rectangle rule, which coincides with
the trapezoid rule once the boundary amplitudes are negligible).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import berry
from . import deformations as dfm
from . import operator_core as oc
from .deformations import ParamPoint, sinhc
from .errors import DomainError, GridError, InvalidArgumentError
from .loops import ParamLoop

BOUNDARY_TOL = 1e-10
COVERAGE_SIGMAS = 8.0


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -12.0
    x_max: float = 12.0
    points: int = 2048

    def __post_init__(self):
        if self.points < 512:
            raise GridError(f"grid needs at least 512 points, got {self.points}")
        if not self.x_max > self.x_min:
            raise GridError("x_max must exceed x_min")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)


@dataclass(frozen=True)
class GaussianParams:
    """psi ~ exp(-u x^2 / 2 - v x).

    ``u``, ``v`` solve G(R) psi = 0; ``u_printed``, ``v_printed`` are the
    textbook closed forms, kept for comparison (they differ in u by a factor 2).
    """

    u: complex
    v: complex
    u_printed: complex
    v_printed: complex

    @property
    def width(self) -> float:
        """Standard deviation of |psi|^2."""
        return 1.0 / math.sqrt(2.0 * self.u.real)

    @property
    def center(self) -> float:
        return -self.v.real / self.u.real

    @property
    def log_prefactor(self) -> float:
        """log of the real normalization constant of exp(-u x^2/2 - v x)."""
        u1, v1 = self.u.real, self.v.real
        return 0.25 * math.log(u1 / math.pi) - 0.5 * v1 * v1 / u1


def _mixing(R: ParamPoint) -> tuple[float, complex]:
    """(cosh|beta|, (beta/|beta|) sinh|beta|)."""
    b = abs(R.beta)
    return math.cosh(b), R.beta * sinhc(b)


def uv_coefficients(R: ParamPoint) -> GaussianParams:
    mw = R.m * R.omega
    b = abs(R.beta)
    b1, b2 = R.beta.real, R.beta.imag
    a1, a2 = R.alpha.real, R.alpha.imag
    if b == 0.0:
        u_pr = complex(mw / 2.0)
        v_pr = -math.sqrt(2.0 * mw) * R.alpha
    else:
        den = b * math.cosh(2 * b) + b1 * math.sinh(2 * b)
        if den <= 0.0:
            raise DomainError(f"Gaussian coefficient denominator {den:g} is not positive")
        u_pr = (mw / 2.0) * complex(b, -b2 * math.sinh(2 * b)) / den
        v_pr = math.sqrt(2.0 * mw) * complex(-a1 * b, (a1 * b2 - a2 * b1) * math.sinh(2 * b) - a2 * b * math.cosh(2 * b)) / den

    # G = kappa (c - e s) x + mu (c + e s) d/dx + (e s alpha^* - c alpha)
    c, es = _mixing(R)
    u = mw * (c - es) / (c + es)
    v = math.sqrt(2.0 * mw) * (es * R.alpha.conjugate() - c * R.alpha) / (c + es)
    if u.real <= 0.0:
        raise DomainError("Gaussian is not normalizable")
    return GaussianParams(complex(u), complex(v), complex(u_pr), complex(v_pr))


def gaussian_samples(u: complex, v: complex, grid: GridSpec) -> np.ndarray:
    """Unnormalized exp(-u x^2/2 - v x) shifted by a real constant for stability."""
    x = grid.x
    expo = -0.5 * u * x * x - v * x
    return np.exp(expo - expo.real.max())


def ground_wavefunction(R: ParamPoint, grid: GridSpec | None = None, check: bool = True) -> oc.StateVector:
    """Normalized ground state of G(R) on the grid, real positive prefactor."""
    grid = grid or GridSpec()
    gp = uv_coefficients(R)
    if check:
        lo, hi = gp.center - COVERAGE_SIGMAS * gp.width, gp.center + COVERAGE_SIGMAS * gp.width
        if lo < grid.x_min or hi > grid.x_max:
            raise GridError(f"grid [{grid.x_min}, {grid.x_max}] does not cover [{lo:.3g}, {hi:.3g}]")
    psi = gaussian_samples(gp.u, gp.v, grid)
    psi = psi / math.sqrt(np.sum(np.abs(psi) ** 2) * grid.h)
    if check and max(abs(psi[0]), abs(psi[-1])) >= BOUNDARY_TOL:
        raise GridError(f"boundary amplitude {max(abs(psi[0]), abs(psi[-1])):.2e} exceeds {BOUNDARY_TOL}")
    return oc.StateVector(psi * math.sqrt(grid.h), "grid")


def derivative(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central difference; lower order in the two edge cells."""
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[1] = (f[2] - f[0]) / (2 * h)
    d[-2] = (f[-1] - f[-3]) / (2 * h)
    d[0] = (f[1] - f[0]) / h
    d[-1] = (f[-1] - f[-2]) / h
    return d


def apply_generator(R: ParamPoint, psi: np.ndarray, grid: GridSpec) -> np.ndarray:
    """G(R) acting on grid samples, with q = x and p = -i d/dx."""
    mw = R.m * R.omega
    kappa, mu = math.sqrt(mw / 2.0), 1.0 / math.sqrt(2.0 * mw)
    c, es = _mixing(R)
    const = es * R.alpha.conjugate() - c * R.alpha
    return kappa * (c - es) * grid.x * psi + mu * (c + es) * derivative(psi, grid.h) + const * psi


def closure_residual(R: ParamPoint, grid: GridSpec | None = None, printed: bool = False) -> float:
    """L2 norm of G(R) psi_0 on the grid (psi_0 from corrected or printed u, v)."""
    grid = grid or GridSpec()
    gp = uv_coefficients(R)
    u, v = (gp.u_printed, gp.v_printed) if printed else (gp.u, gp.v)
    psi = gaussian_samples(u, v, grid)
    psi = psi / math.sqrt(np.sum(np.abs(psi) ** 2) * grid.h)
    r = apply_generator(R, psi, grid)
    return float(math.sqrt(np.sum(np.abs(r[2:-2]) ** 2) * grid.h))


def hermite_functions(x: np.ndarray, count: int) -> np.ndarray:
    """(count, len(x)) oscillator eigenfunctions at m omega = 1 by three-term recursion."""
    if count < 1:
        raise InvalidArgumentError("need at least one Hermite function")
    phi = np.zeros((count, x.size))
    phi[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if count > 1:
        phi[1] = math.sqrt(2.0) * x * phi[0]
    for k in range(1, count - 1):
        phi[k + 1] = math.sqrt(2.0 / (k + 1)) * x * phi[k] - math.sqrt(k / (k + 1)) * phi[k - 1]
    return phi


def fock_to_grid(state: oc.StateVector, grid: GridSpec) -> oc.StateVector:
    """Expand Fock amplitudes in Hermite functions; same storage convention as the grid states."""
    phi = hermite_functions(grid.x, state.dim)
    return oc.StateVector(state.amplitudes @ phi * math.sqrt(grid.h), "grid")


def fock_grid_overlap(n: int, R: ParamPoint, grid: GridSpec | None = None, dim: int = 100, ground: int = 0) -> float:
    """|<psi_ground(grid) | n, R (Fock, expanded on the grid)>|."""
    grid = grid or GridSpec()
    if ground != 0:
        raise InvalidArgumentError("only the ground state has a grid closed form")
    g = ground_wavefunction(R, grid)
    f = fock_to_grid(dfm.eigenstate(n, R, dim), grid)
    return abs(oc.inner(g, f))


def position_moments(state: oc.StateVector, grid: GridSpec) -> tuple[float, float]:
    """(<x>, var x) of a grid state."""
    w = np.abs(state.amplitudes) ** 2
    w = w / w.sum()
    mean = float(np.sum(w * grid.x))
    return mean, float(np.sum(w * (grid.x - mean) ** 2))


def gamma0_grid(loop: ParamLoop, grid: GridSpec | None = None) -> float:
    """Discrete overlap-product phase of the grid ground states."""
    grid = grid or GridSpec()
    states = berry.loop_states(loop, lambda R: ground_wavefunction(R, grid).amplitudes[:, None])
    return float(berry.overlap_phases(states).sum())


def gamma0_connection(loop: ParamLoop, grid: GridSpec | None = None, step: float = 1e-5) -> float:
    """i * loop integral of <psi_0 | d psi_0> by central differences at chord midpoints.

    Uses the smooth real-prefactor gauge of :func:`ground_wavefunction`, so it
    checks the overlap-product route with an independent discretization.
    """
    grid = grid or GridSpec()
    x = loop.coordinates()
    total = 0.0
    for k in range(loop.segments):
        d = x[k + 1] - x[k]
        L = float(np.linalg.norm(d))
        if L == 0.0:
            continue
        u = d / L
        mid = loop.points[k].shifted(0.5 * d)
        psi = ground_wavefunction(mid, grid).amplitudes
        plus = ground_wavefunction(mid.shifted(step * u), grid, check=False).amplitudes
        minus = ground_wavefunction(mid.shifted(-step * u), grid, check=False).amplitudes
        dpsi = (plus - minus) / (2.0 * step)
        total += float((1j * np.vdot(psi, dpsi)).real) * L
    return total


def commutator_one_form(R: ParamPoint, dR) -> complex:
    """Scalar value of [G(R), dG^dagger(R)] along the displacement ``dR``.

    ``dR`` is given in (lam, alpha1, alpha2, beta1, beta2).
    """
    dlam, _, _, db1, db2 = np.asarray(dR, dtype=float)
    b = abs(R.beta)
    b1, b2 = R.beta.real, R.beta.imag
    sc = sinhc(b)
    return 1j * b2 * sc * math.cosh(b) * dlam - 1j * sc * sc * (b2 * db1 - b1 * db2)


def commutator_matrix_scalar(R: ParamPoint, dR, dim: int = 60, step: float = 1e-5) -> tuple[complex, float]:
    """[G, dG^dagger] from central differences of the generator matrix.

    Returns the mean diagonal on the leading block and the largest deviation
    from that multiple of the identity there.
    """
    d = np.asarray(dR, dtype=float)
    L = float(np.linalg.norm(d))
    if L == 0.0:
        return 0j, 0.0
    u = d / L
    Gp = oc.adjoint(dfm.generator_G(R.shifted(step * u), dim))
    Gm = oc.adjoint(dfm.generator_G(R.shifted(-step * u), dim))
    M = oc.commutator(dfm.generator_G(R, dim), (Gp - Gm) * (L / (2.0 * step)))
    size = oc.leading_size(dim)
    block = M[:size, :size]
    scalar = complex(np.mean(np.diag(block)))
    return scalar, float(np.max(np.abs(block - scalar * np.eye(size))))


def _commutator_form_components(x: np.ndarray) -> np.ndarray:
    # i times the commutator one-form, as a real form in (lam, alpha1, alpha2, beta1, beta2)
    out = np.zeros_like(x)
    for j, row in enumerate(x):
        R = ParamPoint.from_coords(*row)
        for i in (0, 3, 4):
            e = np.zeros(5)
            e[i] = 1.0
            out[j, i] = (1j * commutator_one_form(R, e)).real
    return out


def gamma1_from_gamma0(loop: ParamLoop, grid: GridSpec | None = None) -> float:
    """gamma_1 = gamma_0 (grid) + i * loop integral of the commutator one-form."""
    return gamma0_grid(loop, grid) + berry.integrate_one_form(loop, _commutator_form_components)
