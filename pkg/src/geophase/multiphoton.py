"""Two-photon ladder algebra on the even Fock subspace and its square-root hierarchy.

All operators live in the full reference basis; the subspaces
H_k = span{|2^k n>} are described by index maps rather than compacted storage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import berry
from . import deformations as dfm
from . import operator_core as oc
from .deformations import ParamPoint
from .errors import InvalidDimensionError, PreconditionError
from .loops import ParamLoop


@dataclass(frozen=True)
class SubspaceMap:
    """Embedding n -> 2**k * n of H_k into the reference basis of size ``dim_parent``."""

    k: int
    dim_parent: int

    def __post_init__(self):
        if self.k < 0:
            raise PreconditionError("subspace level must be >= 0")

    @property
    def stride(self) -> int:
        return 2**self.k

    @property
    def dim_sub(self) -> int:
        return (self.dim_parent - 1) // self.stride + 1

    def indices(self, limit: int | None = None) -> np.ndarray:
        """Parent indices of the H_k basis, optionally only those below ``limit``."""
        top = self.dim_parent if limit is None else min(limit, self.dim_parent)
        return np.arange(0, top, self.stride)


def _even_block(dim: int) -> np.ndarray:
    return SubspaceMap(1, dim).indices(oc.leading_size(dim))


def _check_dim(dim: int, minimum: int) -> None:
    if dim < minimum:
        raise InvalidDimensionError(f"dim must be >= {minimum}, got {dim}")


def x_operator(dim: int) -> np.ndarray:
    """X = (1/2)(1 + a^dagger a)^(-1)."""
    return oc.number_function(lambda x: 0.5 / x, dim)


def two_photon_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(XG, G^dagger) = ((1/2)(1 + a^dagger a)^(-1) a^2, a^dagger^2)."""
    a = oc.make_annihilator(dim)
    ad = oc.adjoint(a)
    return x_operator(dim) @ (a @ a), ad @ ad


def pair_commutator_check(dim: int) -> float:
    """Max deviation of [XG, G^dagger] from the identity on even basis vectors."""
    _check_dim(dim, 8)
    XG, Gd = two_photon_ops(dim)
    C = oc.commutator(XG, Gd)
    size = oc.leading_size(dim)
    cols = _even_block(dim)
    return float(np.max(np.abs(C[:size, cols] - np.eye(dim)[:size, cols])))


def number_check(dim: int, n_max: int = 5) -> float:
    """Max deviation of G^dagger X G |2n> from n |2n>, n = 0..n_max."""
    XG, Gd = two_photon_ops(dim)
    N = Gd @ XG
    dev = 0.0
    for n in range(n_max + 1):
        e = oc.basis_vector(2 * n, dim).amplitudes
        dev = max(dev, float(np.max(np.abs(N @ e - n * e))))
    return dev


def naive_displacement(alpha: complex, dim: int) -> np.ndarray:
    """exp(alpha G^dagger - alpha^* XG); not unitary because [G, G^dagger] != 1."""
    XG, Gd = two_photon_ops(dim)
    alpha = complex(alpha)
    return oc.matrix_exponential(alpha * Gd - alpha.conjugate() * XG)


def naive_displacement_defect(alpha: complex, dim: int) -> float:
    """Max |E^dagger E - I| on the leading even block."""
    E = naive_displacement(alpha, dim)
    idx = SubspaceMap(1, dim).indices(dim // 3)
    M = oc.adjoint(E) @ E - np.eye(dim)
    return float(np.max(np.abs(M[np.ix_(idx, idx)])))


def squeezed_vacuum(beta: complex, dim: int, lam: float = 0.0) -> oc.StateVector:
    return eigenstate_2n(0, beta, dim, lam)


def squeezed_vacuum_eigen_check(beta: complex, dim: int) -> tuple[complex, float]:
    """Eigenvalue of XG on S(beta)|0> by least squares, and the fit residual norm."""
    beta = complex(beta)
    if beta == 0:
        return 0j, 0.0
    psi = squeezed_vacuum(beta, dim).amplitudes
    XG, _ = two_photon_ops(dim)
    phi = XG @ psi
    c = complex(np.vdot(psi, phi) / np.vdot(psi, psi))
    return c, float(np.linalg.norm(phi - c * psi))


def _dressing(beta: complex, lam: float, n: int) -> np.ndarray:
    # V = S(beta; a(R)) U so that V|k> is the k-th deformed state
    R = ParamPoint.from_coords(lam=lam)
    return dfm._squeeze(complex(beta), lam, n) @ dfm.reference_eigenvectors(R, n)


def hamiltonian_HS(beta: complex, omega: float, dim: int, lam: float = 0.0) -> np.ndarray:
    """H_S = (omega/2) S [a^dagger^2 (1 + a^dagger a)^(-1) a^2 + 1] S^dagger with a = a(R).

    Formed at twice ``dim`` and cropped.
    """
    n = 2 * dim
    a = oc.make_annihilator(n)
    ad = oc.adjoint(a)
    inv = oc.number_function(lambda x: 1.0 / x, n)
    H0 = 0.5 * omega * (ad @ ad @ inv @ a @ a + np.eye(n))
    V = _dressing(beta, lam, n)
    H = (V @ H0 @ oc.adjoint(V))[:dim, :dim]
    return 0.5 * (H + oc.adjoint(H))


def eigenstate_2n(n: int, beta: complex, dim: int, lam: float = 0.0, tail_tol: float = dfm.DEFAULT_TAIL_TOL) -> oc.StateVector:
    """|2n; beta> = S(beta)|2n> (squeeze applied to the raised number state)."""
    R = ParamPoint.from_coords(lam=lam, beta1=complex(beta).real, beta2=complex(beta).imag)
    return dfm.eigenstate(2 * n, R, dim, tail_tol)


def eigenstate_2n_raised(n: int, beta: complex, dim: int, lam: float = 0.0) -> oc.StateVector:
    """(G^dagger)^n |0; beta>, normalized, with G^dagger = S a^dagger^2 S^dagger."""
    w = 2 * dim
    V = _dressing(beta, lam, w)
    a = dfm._ladder(lam, w)
    ad = oc.adjoint(a)
    S = dfm._squeeze(complex(beta), lam, w)
    Gd = S @ (ad @ ad) @ oc.adjoint(S)
    v = V[:, 0]
    for _ in range(n):
        v = Gd @ v
    return oc.StateVector(v[:dim]).normalized()


def multiphoton_berry_phase(
    n: int,
    loop: ParamLoop,
    dim: int = berry.DEFAULT_DIM,
    tol: float = berry.DEFAULT_TOL,
) -> berry.PhaseReport:
    """Wilson-loop phase of |2n; beta> against the squeeze closed form at index 2n."""
    if any(p.alpha != 0 for p in loop.points):
        raise PreconditionError("multiphoton loops carry no displacement; alpha must be zero")
    gw = float(berry.wilson_loop_phases([2 * n], loop, dim)[0])
    gS = berry.closed_form_squeeze_phase(2 * n, loop)
    disc = abs(gw - gS)
    return berry.PhaseReport(int(n), gw, gS, 0.0, gS, disc, int(dim), loop.segments, bool(disc <= tol))


def a1_operators(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """a_1 = 2^(-1/2) (1 + a^dagger a)^(-1/2) a^2 and its adjoint."""
    _check_dim(dim, 8)
    a = oc.make_annihilator(dim)
    a1 = oc.number_function(lambda x: x**-0.5, dim) @ (a @ a) / math.sqrt(2.0)
    return a1, oc.adjoint(a1)


def ak_operator(k: int, dim: int) -> np.ndarray:
    """a_k from a_(k-1) by the square-root recursion; a_0 is the reference annihilator."""
    if k < 0:
        raise PreconditionError("k must be >= 0")
    _check_dim(dim, 8 * 2**k)
    ak = oc.make_annihilator(dim)
    for _ in range(k):
        # a_(k-1)^dagger a_(k-1) is diagonal in the Fock basis
        root = oc.diagonal_function(lambda d: (1.0 + d.real) ** -0.5, oc.adjoint(ak) @ ak)
        ak = root @ (ak @ ak) / math.sqrt(2.0)
    return ak


def a1_commutator_check(dim: int) -> float:
    a1, a1d = a1_operators(dim)
    C = oc.commutator(a1, a1d)
    size = oc.leading_size(dim)
    cols = _even_block(dim)
    return float(np.max(np.abs(C[:size, cols] - np.eye(dim)[:size, cols])))


def isomorphism_check(k: int, dim: int, count: int | None = None) -> float:
    """Max |<2^k m| a_k |2^k n> - sqrt(n) delta_(m, n-1)| over the leading H_k indices."""
    ak = ak_operator(k, dim)
    idx = SubspaceMap(k, dim).indices(oc.leading_size(dim))
    if count is not None:
        idx = idx[:count]
    block = ak[np.ix_(idx, idx)]
    target = np.diag(np.sqrt(np.arange(1, len(idx), dtype=float)), 1)
    return float(np.max(np.abs(block - target)))


def n_prime_spectrum(dim: int) -> np.ndarray:
    """Eigenvalues of a_1^dagger a_1 on the leading even indices."""
    a1, a1d = a1_operators(dim)
    idx = _even_block(dim)
    return np.sort(np.linalg.eigvalsh((a1d @ a1)[np.ix_(idx, idx)]))
