"""Self-check suites run at pinned settings by ``geophase verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import berry, loops, multiphoton, position
from . import deformations as dfm
from . import operator_core as oc
from .deformations import ParamPoint

SUITES = ("algebra", "phases", "multiphoton", "appendix")


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    limit: float
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}: measured {self.measured:.3e} (limit {self.limit:.1e})"


def _below(name: str, value: float, limit: float) -> Check:
    return Check(name, float(value), limit, bool(value < limit))


def _above(name: str, value: float, limit: float) -> Check:
    # passes when a known defect is large enough to be detected
    return Check(name + " (detected)", float(value), limit, bool(value > limit))


_SAMPLE = ParamPoint(m=1.3, omega=0.8, alpha=0.3 - 0.2j, beta=0.25 + 0.15j)


def algebra_checks() -> list[Check]:
    dim = 80
    size = oc.leading_size(dim)
    a = oc.make_annihilator(dim)
    G = dfm.generator_G(_SAMPLE, dim)
    out = [
        _below("[a, a^dagger] = 1", oc.block_deviation(oc.commutator(a, oc.adjoint(a)), np.eye(dim)), 1e-12),
        _below("[G, G^dagger] = 1", oc.block_deviation(oc.commutator(G, oc.adjoint(G)), np.eye(dim)), 1e-9),
        _below("explicit G equals D S a S^dagger D^dagger", oc.block_deviation(G, dfm.generator_conjugated(_SAMPLE, dim)), 1e-9),
        _below("a(R) from quadratures", oc.block_deviation(dfm.ladder_at(_SAMPLE, dim), dfm.ladder_from_quadratures(_SAMPLE, dim)), 1e-9),
        _below(
            "normal-ordered squeeze",
            oc.block_deviation(dfm.normal_ordered_squeeze(_SAMPLE.beta, _SAMPLE, dim), dfm.squeeze_op(_SAMPLE.beta, _SAMPLE, dim)),
            1e-9,
        ),
        _below("[XG, G^dagger] = 1 on even states", multiphoton.pair_commutator_check(dim), 1e-9),
        _below("G^dagger X G |2n> = n |2n>", multiphoton.number_check(dim), 1e-9),
        _below("[a_1, a_1^dagger] = 1 on even states", multiphoton.a1_commutator_check(dim), 1e-9),
        _below("a_2 isomorphic to a", multiphoton.isomorphism_check(2, 128), 1e-9),
        _below(
            "a_1^dagger a_1 spectrum 0, 1, 2, ...",
            float(np.max(np.abs(multiphoton.n_prime_spectrum(dim)[:6] - np.arange(6)))),
            1e-9,
        ),
        _above("naive two-photon displacement is not unitary", multiphoton.naive_displacement_defect(0.3, dim), 1e-2),
    ]
    H = dfm.deformed_hamiltonian(_SAMPLE, dim)
    vals = np.sort(np.linalg.eigvalsh(H[:size, :size]))[:5]
    out.append(_below("H(R) spectrum omega (n + 1/2)", float(np.max(np.abs(vals - _SAMPLE.omega * (np.arange(5) + 0.5)))), 1e-6))
    q = dfm.quadratic_coefficients(ParamPoint(m=1.0, omega=2.0, alpha=0.2, beta=0.3j), 30)
    out.append(_below("quadratic form with omega-corrected B", q.residual_corrected, 1e-7))
    out.append(_above("printed B at omega != 1", q.residual_printed, 1e-7))
    return out


def phase_checks() -> list[Check]:
    base = ParamPoint()
    a_loop = loops.circle(base, ("alpha1", "alpha2"), 0.5, 400)
    b_loop = loops.circle(base, ("beta1", "beta2"), 0.3, 400)
    ra = berry.phase_reports([0, 1, 2], a_loop, 60)
    rb = berry.phase_reports([0, 1], b_loop, 80)
    s2 = 2 * math.pi * math.sinh(0.3) ** 2
    out = [_below(f"alpha-circle n={r.n} Wilson vs closed", r.discrepancy, 1e-3) for r in ra]
    out.append(_below("alpha-circle closed form = -pi/2", abs(ra[0].gamma_closed + math.pi / 2), 1e-3))
    # on the inscribed polygon the displacement form integrates to minus twice its area
    poly_area = 0.5 * 400 * 0.5**2 * math.sin(2 * math.pi / 400)
    out.append(_below("alpha-circle closed form = -2 x polygon area", abs(ra[0].gamma_closed + 2 * poly_area), 1e-12))
    out.append(_below("alpha-circle Hannay angle", abs(ra[0].gamma_wilson - ra[1].gamma_wilson), 1e-6))
    out += [_below(f"beta-circle n={r.n} Wilson vs closed", r.discrepancy, 1e-3) for r in rb]
    out.append(_below("beta-circle Hannay angle 2 pi sinh^2", abs(rb[0].gamma_wilson - rb[1].gamma_wilson - s2), 1e-3))
    out.append(_below("beta-circle gamma_1 / gamma_0 = 3", abs(rb[1].gamma_wilson / rb[0].gamma_wilson - 3), 1e-3))
    out.append(_below("arg-beta form equals squeeze form", abs(berry.arg_beta_phase(0, b_loop) - rb[0].gamma_S), 1e-8))
    lam_loop = loops.lissajous(base, {"lam": {"center": 0.0, "amplitude": 0.5}}, 64)
    out.append(_below("lam-only loop", float(np.max(np.abs(berry.wilson_loop_phases([0, 1, 2], lam_loop, 60)))), 1e-8))
    out.append(_below("constant loop", float(np.max(np.abs(berry.wilson_loop_phases([0, 1], loops.constant_loop(_SAMPLE), 60)))), 1e-8))
    mixed = loops.composed_circles(base, 0.4, 0.25, 400)
    out.append(_below("linearity in n on alpha-then-beta loop", berry.linearity_check(mixed, 4, 120), 1e-5))
    centre = base.replace(beta1=0.3)
    small = loops.circle(centre, ("beta1", "beta2"), 0.05, 200)
    for n in (0, 1):
        flux = berry.curvature_at(centre, "beta", n) * math.pi * 0.05**2
        out.append(_below(f"beta curvature x area n={n} (relative)", abs(berry.wilson_loop_phase(n, small, 80) / flux - 1), 0.05))
    return out


def multiphoton_checks() -> list[Check]:
    out = []
    for beta in (0.4, 0.4j, 0.3 + 0.2j):
        c, res = multiphoton.squeezed_vacuum_eigen_check(beta, 80)
        b = abs(beta)
        target = beta / (2 * b) * math.tanh(b)
        out.append(_below(f"XG eigenvalue on S({beta})|0> (relative)", abs(c - target) / abs(target), 1e-8))
        out.append(_below(f"S({beta})|0> is an XG eigenvector", res, 1e-8))
    beta, dim = 0.2 + 0.1j, 60
    H = multiphoton.hamiltonian_HS(beta, 1.0, dim)
    for n in (0, 1, 2):
        v = multiphoton.eigenstate_2n(n, beta, dim).amplitudes
        out.append(_below(f"H_S |{2 * n}; beta> = {n + 0.5} |{2 * n}; beta>", float(np.linalg.norm(H @ v - (n + 0.5) * v)), 1e-8))
        w = multiphoton.eigenstate_2n_raised(n, beta, dim)
        out.append(_below(f"two constructions of |{2 * n}; beta> agree", abs(1 - abs(oc.inner(v, w))), 1e-8))
    loop = loops.circle(ParamPoint(), ("beta1", "beta2"), 0.3, 400)
    r = multiphoton.multiphoton_berry_phase(1, loop, 80)
    out.append(_below("|2; beta> phase vs gamma_2 squeeze form", r.discrepancy, 1e-3))
    return out


def appendix_checks() -> list[Check]:
    grid = position.GridSpec()
    base = ParamPoint()
    out = []
    R = ParamPoint(m=1.2, omega=0.9, alpha=0.3 + 0.1j, beta=0.2 - 0.15j)
    out.append(_below("G(R) psi_0 = 0 with corrected u, v", position.closure_residual(R, grid), 1e-6))
    out.append(_above("printed u fails G(R) psi_0 = 0", position.closure_residual(R, grid, printed=True), 1e-3))
    out.append(_below("grid psi_0 overlaps Fock |0, R>", abs(1 - position.fock_grid_overlap(0, R, grid)), 1e-8))
    a_loop = loops.circle(base, ("alpha1", "alpha2"), 0.5, 400)
    b_loop = loops.circle(base, ("beta1", "beta2"), 0.3, 400)
    for label, loop, dim in (("alpha", a_loop, 60), ("beta", b_loop, 80)):
        fock = berry.wilson_loop_phase(0, loop, dim)
        out.append(_below(f"{label}-circle grid gamma_0 vs Fock", abs(position.gamma0_grid(loop, grid) - fock), 2e-3))
    out.append(_below("beta-circle gamma_0 from connection quadrature", abs(position.gamma0_connection(b_loop, grid) - berry.wilson_loop_phase(0, b_loop, 80)), 2e-3))
    Rc = ParamPoint(m=1.1, omega=1.0, alpha=0.1, beta=0.2 + 0.25j)
    dR = np.array([0.01, 0.0, 0.0, 0.004, -0.007])
    scalar, resid = position.commutator_matrix_scalar(Rc, dR)
    out.append(_below("[G, dG^dagger] closed form vs matrix", abs(scalar - position.commutator_one_form(Rc, dR)), 1e-6))
    out.append(_below("[G, dG^dagger] is a multiple of the identity", resid, 1e-8))
    g1 = position.gamma1_from_gamma0(b_loop, grid)
    out.append(_below("gamma_1 from gamma_0 plus commutator form", abs(g1 - berry.wilson_loop_phase(1, b_loop, 80)), 1e-3))
    return out


RUNNERS: dict[str, Callable[[], list[Check]]] = {
    "algebra": algebra_checks,
    "phases": phase_checks,
    "multiphoton": multiphoton_checks,
    "appendix": appendix_checks,
}


def run_suite(name: str) -> list[Check]:
    names = SUITES if name == "all" else (name,)
    checks: list[Check] = []
    for s in names:
        checks.extend(RUNNERS[s]())
    return checks
