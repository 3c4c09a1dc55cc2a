"""Dense truncated Fock-space linear algebra.

Operators are plain ``numpy`` complex arrays of shape ``(dim, dim)`` in the
reference number basis (hbar = 1, reference oscillator at m*omega = 1).
States are wrapped in :class:`StateVector` so that the truncation
diagnostic travels with the amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AccuracyError, DomainError, InvalidArgumentError, InvalidDimensionError

NORM_EPS = 1e-12
LEADING_FRACTION = 0.7
DEFAULT_EXPM_TOL = 1e-12

# Pade [13/13] numerator coefficients and the matching scaling threshold
# (Higham 2005, "The scaling and squaring method for the matrix exponential revisited").
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


@dataclass(frozen=True)
class StateVector:
    """A state in the Fock basis or sampled on a position grid."""

    amplitudes: np.ndarray
    basis_tag: str = "fock"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise InvalidArgumentError("amplitudes must be one-dimensional")
        if self.basis_tag not in ("fock", "grid"):
            raise InvalidArgumentError(f"unknown basis tag {self.basis_tag!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def tail_mass(self) -> float:
        """Probability carried by the top 10% of basis indices."""
        width = max(1, int(math.ceil(0.1 * self.dim)))
        return float(np.sum(np.abs(self.amplitudes[-width:]) ** 2))

    def normalized(self) -> "StateVector":
        nrm = self.norm
        if nrm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / nrm, self.basis_tag)


def leading_size(dim: int) -> int:
    """Size of the block on which truncated identities are asserted."""
    return int(math.floor(LEADING_FRACTION * dim))


def basis_vector(k: int, dim: int) -> StateVector:
    if not 0 <= k < dim:
        raise InvalidArgumentError(f"index {k} outside basis of size {dim}")
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return StateVector(v)


def make_annihilator(dim: int) -> np.ndarray:
    """Reference annihilator with <n-1|a|n> = sqrt(n)."""
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dim must be an integer >= 2, got {dim!r}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def make_creator(dim: int) -> np.ndarray:
    return adjoint(make_annihilator(dim))


def number_operator(dim: int) -> np.ndarray:
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def number_function(f: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Diagonal operator f(1 + a^dagger a), i.e. diag(f(1), f(2), ..., f(dim)).

    ``f`` is applied elementwise to the float array ``1 + n``.
    """
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    args = 1.0 + np.arange(dim, dtype=float)
    with np.errstate(all="ignore"):
        values = np.asarray(f(args), dtype=complex)
    values = np.broadcast_to(values, args.shape)
    if not np.all(np.isfinite(values)):
        bad = args[~np.isfinite(values)]
        raise DomainError(f"function is not finite at 1+n = {bad[:5].tolist()}")
    return np.diag(values)


def diagonal_function(f: Callable[[np.ndarray], np.ndarray], M: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Apply ``f`` to a matrix that is diagonal in the Fock basis."""
    M = _as_operator(M)
    diag = np.diag(M)
    if np.max(np.abs(M - np.diag(diag)), initial=0.0) > atol:
        raise DomainError("matrix is not diagonal in the Fock basis")
    with np.errstate(all="ignore"):
        values = np.asarray(f(diag), dtype=complex)
    if not np.all(np.isfinite(values)):
        raise DomainError("function is not finite on the diagonal")
    return np.diag(values)


def matrix_exponential(M: np.ndarray, tol: float = DEFAULT_EXPM_TOL) -> np.ndarray:
    """exp(M) by scaling and squaring around a fixed [13/13] Pade approximant.

    After evaluation the relative commutator residual ||[M, e^M]|| / (||M|| ||e^M||)
    is compared with ``tol``; exceeding it raises :class:`AccuracyError`.
    """
    A = _as_operator(M)
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix exponential of non-finite matrix")
    dim = A.shape[0]
    ident = np.eye(dim, dtype=complex)
    norm1 = np.linalg.norm(A, 1)
    if norm1 == 0.0:
        return ident
    s = max(0, int(math.ceil(math.log2(norm1 / _THETA13))))
    A = A / (2.0**s)
    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A2 @ A4
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E

    Mfull = _as_operator(M)
    scale = norm1 * np.linalg.norm(E, 1)
    residual = float(np.linalg.norm(Mfull @ E - E @ Mfull, 1) / scale) if scale > 0 else 0.0
    if not np.all(np.isfinite(E)) or residual > tol:
        raise AccuracyError("matrix exponential did not reach requested tolerance", residual)
    return E


def adjoint(M: np.ndarray) -> np.ndarray:
    return _as_operator(M).conj().T


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = _as_operator(A)
    B = _as_operator(B)
    _check_same_dim(A.shape[0], B.shape[0])
    return A @ B - B @ A


def apply(M: np.ndarray, v) -> StateVector:
    M = _as_operator(M)
    vec = _amps(v)
    _check_same_dim(M.shape[0], vec.shape[0])
    tag = v.basis_tag if isinstance(v, StateVector) else "fock"
    return StateVector(M @ vec, tag)


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    a = _amps(u)
    b = _amps(v)
    _check_same_dim(a.shape[0], b.shape[0])
    return complex(np.vdot(a, b))


def block_deviation(A: np.ndarray, B: np.ndarray, size: int | None = None) -> float:
    """Max entrywise |A - B| over the leading ``size`` x ``size`` block."""
    A = np.asarray(A)
    B = np.asarray(B)
    _check_same_dim(A.shape[0], B.shape[0])
    if size is None:
        size = leading_size(A.shape[0])
    return float(np.max(np.abs(A[:size, :size] - B[:size, :size])))


def _amps(v) -> np.ndarray:
    if isinstance(v, StateVector):
        return v.amplitudes
    return np.asarray(v, dtype=complex)


def _as_operator(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 2:
        raise InvalidDimensionError(f"operator dimension must be >= 2, got {M.shape[0]}")
    return M


def _check_same_dim(m: int, n: int) -> None:
    if m != n:
        raise InvalidArgumentError(f"dimension mismatch: {m} vs {n}")
