"""Squeezed and displaced oscillators in a fixed reference Fock basis.

A parameter point R = (m, omega, alpha, beta) acts through the mass-frequency
dependent ladder operator

    a(R) = cosh(lam/2) a0 + sinh(lam/2) a0^dagger,   lam = ln(m omega),

which is what (m omega / 2)^(1/2) q + i (2 m omega)^(-1/2) p becomes when q and
p are written with the reference annihilator a0 (m0 omega0 = 1).  Squeezing and
displacement are exponentials built from a(R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from . import operator_core as oc
from .errors import DomainError, InvalidDimensionError, TruncationError

COORDINATES = ("lam", "alpha1", "alpha2", "beta1", "beta2")
DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class ParamPoint:
    """One point R = (m, omega, alpha, beta) of parameter space."""

    m: float = 1.0
    omega: float = 1.0
    alpha: complex = 0j
    beta: complex = 0j

    def __post_init__(self):
        if not (self.m > 0 and self.omega > 0):
            raise DomainError(f"mass and frequency must be positive, got m={self.m}, omega={self.omega}")
        if not (math.isfinite(self.m) and math.isfinite(self.omega)):
            raise DomainError("mass and frequency must be finite")
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise DomainError("alpha and beta must be finite")

    @classmethod
    def from_coords(cls, lam=0.0, alpha1=0.0, alpha2=0.0, beta1=0.0, beta2=0.0, m=1.0) -> "ParamPoint":
        return cls(m=m, omega=math.exp(lam) / m, alpha=complex(alpha1, alpha2), beta=complex(beta1, beta2))

    @property
    def lam(self) -> float:
        return math.log(self.m * self.omega)

    def coords(self) -> np.ndarray:
        """(lam, alpha1, alpha2, beta1, beta2) as a float array."""
        a, b = self.alpha, self.beta
        return np.array([self.lam, a.real, a.imag, b.real, b.imag])

    def coord(self, name: str) -> float:
        if name == "m":
            return self.m
        if name == "omega":
            return self.omega
        return float(self.coords()[COORDINATES.index(name)])

    def replace(self, **values) -> "ParamPoint":
        """Return a copy with named coordinates overridden.

        Accepts ``m``, ``omega`` and any of :data:`COORDINATES`.  Setting
        ``lam`` keeps the mass and adjusts the frequency.
        """
        m = values.pop("m", self.m)
        omega = values.pop("omega", self.omega)
        alpha1 = values.pop("alpha1", self.alpha.real)
        alpha2 = values.pop("alpha2", self.alpha.imag)
        beta1 = values.pop("beta1", self.beta.real)
        beta2 = values.pop("beta2", self.beta.imag)
        if "lam" in values:
            omega = math.exp(values.pop("lam")) / m
        if values:
            raise KeyError(f"unknown coordinates {sorted(values)}")
        return ParamPoint(m, omega, complex(alpha1, alpha2), complex(beta1, beta2))

    def shifted(self, d: np.ndarray) -> "ParamPoint":
        """Shift by a displacement given in (lam, alpha1, alpha2, beta1, beta2)."""
        x = self.coords() + np.asarray(d, dtype=float)
        return self.replace(lam=x[0], alpha1=x[1], alpha2=x[2], beta1=x[3], beta2=x[4])


def sinhc(x: float) -> float:
    """sinh(x)/x with the x -> 0 limit 1."""
    x = abs(x)
    if x < 1e-4:
        return 1.0 + x * x / 6.0 + x**4 / 120.0
    return math.sinh(x) / x


def _frozen(M: np.ndarray) -> np.ndarray:
    M.setflags(write=False)
    return M


@lru_cache(maxsize=64)
def _reference_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    a0 = _frozen(oc.make_annihilator(dim))
    return a0, _frozen(oc.adjoint(a0))


@lru_cache(maxsize=256)
def _ladder(lam: float, dim: int) -> np.ndarray:
    a0, a0d = _reference_ops(dim)
    r = 0.5 * lam
    return _frozen(math.cosh(r) * a0 + math.sinh(r) * a0d)


@lru_cache(maxsize=256)
def _reference_unsqueeze(lam: float, dim: int) -> np.ndarray:
    # U with U a0 U^dagger = a(R); U|n> is the n-th eigenvector of a^dagger(R) a(R)
    a0, a0d = _reference_ops(dim)
    r = 0.5 * lam
    if r == 0.0:
        return _frozen(np.eye(dim, dtype=complex))
    return _frozen(oc.matrix_exponential(-0.5 * r * (a0d @ a0d - a0 @ a0)))


def ladder_at(R: ParamPoint, dim: int) -> np.ndarray:
    """a(R) in the reference basis."""
    return _ladder(R.lam, dim)


def ladder_from_quadratures(R: ParamPoint, dim: int) -> np.ndarray:
    """a(R) assembled directly from q and p; independent check of :func:`ladder_at`."""
    a0, a0d = _reference_ops(dim)
    q = (a0 + a0d) / math.sqrt(2.0)
    p = 1j * (a0d - a0) / math.sqrt(2.0)
    mw = R.m * R.omega
    return math.sqrt(mw / 2.0) * q + 1j / math.sqrt(2.0 * mw) * p


def quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum of the reference oscillator."""
    a0, a0d = _reference_ops(dim)
    return (a0 + a0d) / math.sqrt(2.0), 1j * (a0d - a0) / math.sqrt(2.0)


def _crop(M: np.ndarray, dim: int) -> np.ndarray:
    return np.ascontiguousarray(M[:dim, :dim])


def _work(dim: int, work_dim: int | None) -> int:
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    if work_dim is None:
        return 2 * dim
    if work_dim < dim:
        raise InvalidDimensionError(f"work_dim {work_dim} smaller than dim {dim}")
    return work_dim


def _squeeze(beta: complex, lam: float, n: int) -> np.ndarray:
    if beta == 0:
        return np.eye(n, dtype=complex)
    a = _ladder(lam, n)
    ad = oc.adjoint(a)
    return oc.matrix_exponential(0.5 * (beta * (ad @ ad) - beta.conjugate() * (a @ a)))


def _displace(alpha: complex, lam: float, n: int) -> np.ndarray:
    if alpha == 0:
        return np.eye(n, dtype=complex)
    a = _ladder(lam, n)
    return oc.matrix_exponential(alpha * oc.adjoint(a) - alpha.conjugate() * a)


def squeeze_op(beta: complex, R: ParamPoint, dim: int, work_dim: int | None = None) -> np.ndarray:
    """S = exp[(beta a^dagger(R)^2 - beta^* a(R)^2) / 2].

    The exponential is formed at ``work_dim`` (default ``2 * dim``) and cropped;
    a truncated exponential is only trustworthy well below its own cutoff.
    """
    n = _work(dim, work_dim)
    return _crop(_squeeze(complex(beta), R.lam, n), dim)


def displace_op(alpha: complex, R: ParamPoint, dim: int, work_dim: int | None = None) -> np.ndarray:
    """D = exp(alpha a^dagger(R) - alpha^* a(R)), formed at ``work_dim`` and cropped."""
    n = _work(dim, work_dim)
    return _crop(_displace(complex(alpha), R.lam, n), dim)


def normal_ordered_squeeze(beta: complex, R: ParamPoint, dim: int) -> np.ndarray:
    """Squeeze operator from its normal-ordered disentangled expansion."""
    beta = complex(beta)
    if beta == 0:
        return np.eye(dim, dtype=complex)
    b = abs(beta)
    a = ladder_at(R, dim)
    ad = oc.adjoint(a)
    t = math.tanh(b) / (2.0 * b)
    left = oc.matrix_exponential(beta * t * (ad @ ad))
    right = oc.matrix_exponential(-beta.conjugate() * t * (a @ a))

    x = 1.0 / math.cosh(b) - 1.0
    middle = np.eye(dim, dtype=complex)
    ad_pow = np.eye(dim, dtype=complex)
    a_pow = np.eye(dim, dtype=complex)
    coeff = 1.0
    for r in range(1, 10 * dim):
        ad_pow = ad_pow @ ad
        a_pow = a_pow @ a
        coeff *= x / r
        term = coeff * (ad_pow @ a_pow)
        middle += term
        if np.max(np.abs(term)) < 1e-16 * max(1.0, np.max(np.abs(middle))):
            break
    else:
        raise DomainError("normal-ordered series did not converge")
    return (left @ middle @ right) / math.sqrt(math.cosh(b))


def generator_G(R: ParamPoint, dim: int) -> np.ndarray:
    """Lowering operator (a - alpha) cosh|beta| - (a^dagger - alpha^*) (beta/|beta|) sinh|beta|."""
    a = ladder_at(R, dim)
    ad = oc.adjoint(a)
    ident = np.eye(dim, dtype=complex)
    b = abs(R.beta)
    return (a - R.alpha * ident) * math.cosh(b) - (ad - R.alpha.conjugate() * ident) * (R.beta * sinhc(b))


def generator_conjugated(R: ParamPoint, dim: int, work_dim: int | None = None) -> np.ndarray:
    """D S a(R) S^dagger D^dagger, formed by explicit matrix products."""
    n = _work(dim, work_dim)
    W = _displace(R.alpha, R.lam, n) @ _squeeze(R.beta, R.lam, n)
    return _crop(W @ _ladder(R.lam, n) @ oc.adjoint(W), dim)


def deformed_hamiltonian(R: ParamPoint, dim: int, work_dim: int | None = None) -> np.ndarray:
    """H = D S omega (a^dagger a + 1/2) S^dagger D^dagger with a = a(R)."""
    n = _work(dim, work_dim)
    a = _ladder(R.lam, n)
    H0 = R.omega * (oc.adjoint(a) @ a + 0.5 * np.eye(n))
    W = _displace(R.alpha, R.lam, n) @ _squeeze(R.beta, R.lam, n)
    H = _crop(W @ H0 @ oc.adjoint(W), dim)
    return 0.5 * (H + oc.adjoint(H))


def reference_eigenvectors(R: ParamPoint, dim: int) -> np.ndarray:
    """Unitary whose columns are the number states of a^dagger(R) a(R)."""
    return _reference_unsqueeze(R.lam, dim)


def eigenstate_matrix(R: ParamPoint, dim: int) -> np.ndarray:
    """D S U: column n is |n, R> in the deterministic gauge."""
    U = reference_eigenvectors(R, dim)
    return _displace(R.alpha, R.lam, dim) @ (_squeeze(R.beta, R.lam, dim) @ U)


def _sparse_ladder(lam: float, dim: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    a = sp.csr_matrix(_ladder(lam, dim))
    return a, a.conj().T.tocsr()


def eigenstate_columns(levels, R: ParamPoint, dim: int) -> np.ndarray:
    """(dim, len(levels)) array of D S U |n>, built by exponential actions.

    Same vectors as the matching columns of :func:`eigenstate_matrix`, but the
    exponentials of the banded generators act directly on the few requested
    columns.
    """
    X = np.zeros((dim, len(levels)), dtype=complex)
    X[list(levels), np.arange(len(levels))] = 1.0
    r = 0.5 * R.lam
    if r != 0.0:
        a0, a0d = _sparse_ladder(0.0, dim)
        X = expm_multiply(-0.5 * r * (a0d @ a0d - a0 @ a0), X)
    a, ad = _sparse_ladder(R.lam, dim)
    if R.beta != 0:
        X = expm_multiply(0.5 * (R.beta * (ad @ ad) - R.beta.conjugate() * (a @ a)), X)
    if R.alpha != 0:
        X = expm_multiply(R.alpha * ad - R.alpha.conjugate() * a, X)
    return X


def eigenstates(levels, R: ParamPoint, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> list[oc.StateVector]:
    """|n, R> for every n in ``levels``."""
    levels = list(levels)
    if any(n < 0 for n in levels):
        raise DomainError("level index must be non-negative")
    if max(levels, default=0) >= dim:
        raise TruncationError(f"level {max(levels)} does not fit in dim {dim}", 1.0)
    X = eigenstate_columns(levels, R, dim)
    return [checked_state(X[:, j], tail_tol, f"|{n},R> at dim {dim}") for j, n in enumerate(levels)]


def eigenstate(n: int, R: ParamPoint, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> oc.StateVector:
    return eigenstates([n], R, dim, tail_tol)[0]


def checked_state(amplitudes: np.ndarray, tail_tol: float, label: str) -> oc.StateVector:
    state = oc.StateVector(np.array(amplitudes)).normalized()
    if state.tail_mass > tail_tol:
        raise TruncationError(f"{label}: weight near the cutoff exceeds {tail_tol:g}", state.tail_mass)
    return state


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of A p^2 + B (pq + qp) + C q^2 for the squeezed oscillator.

    ``B_printed`` is the textbook expression without a frequency factor;
    ``B_corrected`` multiplies it by omega.  When an identity check was run,
    the residuals of both candidates and the selected one are recorded.
    """

    A: float
    B_printed: float
    B_corrected: float
    C: float
    residual_printed: float | None = None
    residual_corrected: float | None = None
    selected: str | None = None

    @property
    def B(self) -> float:
        return self.B_printed if self.selected == "printed" else self.B_corrected


def quadratic_coefficients(R: ParamPoint, dim: int | None = None, tol: float = 1e-7) -> QuadraticForm:
    """Closed-form quadratic coefficients of omega S (a^dagger a + 1/2) S^dagger.

    With ``dim`` given, both B candidates are tested against the matrix
    identity on the leading block (operators formed at ``4 * dim`` and
    cropped) and the passing one is selected.  The printed form wins a tie,
    which happens exactly when omega = 1.
    """
    m, w = R.m, R.omega
    b = abs(R.beta)
    ch, sh = math.cosh(b), math.sinh(b)
    cs1 = ch * sh / b if b > 0 else 1.0  # cosh|b| sinh|b| / |b|
    A = (ch * ch + sh * sh + 2.0 * R.beta.real * cs1) / (2.0 * m)
    B = -R.beta.imag * cs1
    C = 0.5 * m * w * w * (ch * ch + sh * sh - 2.0 * R.beta.real * cs1)
    form = QuadraticForm(A, B, w * B, C)
    if dim is None:
        return form

    n = 4 * dim
    q, p = quadratures(n)
    a = _ladder(R.lam, n)
    S = _squeeze(R.beta, R.lam, n)
    target = _crop(S @ (w * (oc.adjoint(a) @ a + 0.5 * np.eye(n))) @ oc.adjoint(S), dim)
    pp, qq, pq = (_crop(X, dim) for X in (p @ p, q @ q, p @ q + q @ p))

    def residual(Bval: float) -> float:
        return oc.block_deviation(target, A * pp + Bval * pq + C * qq)

    r_printed = residual(form.B_printed)
    r_corrected = residual(form.B_corrected)
    if r_printed <= tol:
        selected = "printed"
    elif r_corrected <= tol:
        selected = "corrected"
    else:
        selected = None
    return QuadraticForm(A, B, w * B, C, r_printed, r_corrected, selected)
