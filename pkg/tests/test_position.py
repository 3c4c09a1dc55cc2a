import math

import numpy as np
import pytest

from geophase import berry, loops, position
from geophase import deformations as dfm
from geophase.deformations import ParamPoint
from geophase.errors import GridError

GRID = position.GridSpec()


def test_grid_spec_validation():
    with pytest.raises(GridError):
        position.GridSpec(points=100)
    with pytest.raises(GridError):
        position.GridSpec(x_min=1.0, x_max=-1.0)
    assert GRID.x.size == 2048 and GRID.h == pytest.approx(24 / 2047)


def test_reference_ground_state_coefficients():
    gp = position.uv_coefficients(ParamPoint())
    assert gp.u == pytest.approx(1.0)
    assert gp.v == pytest.approx(0.0)
    # the closed form as printed has half the exponent
    assert gp.u_printed == pytest.approx(0.5)


@pytest.mark.parametrize(
    "R",
    [ParamPoint(), ParamPoint(m=1.5, omega=0.8, alpha=0.4 - 0.2j), ParamPoint(m=0.9, beta=0.3 + 0.2j, alpha=0.1j)],
)
def test_gaussian_closure(R):
    assert position.closure_residual(R, GRID) < 1e-6


def test_printed_coefficients_fail_closure():
    R = ParamPoint(alpha=0.2, beta=0.1 + 0.2j)
    assert position.closure_residual(R, GRID, printed=True) > 1e-2


def test_ground_state_normalized():
    psi = position.ground_wavefunction(ParamPoint(alpha=0.3, beta=0.2j), GRID)
    assert psi.norm == pytest.approx(1.0, abs=1e-12)
    assert psi.basis_tag == "grid"


def test_grid_coverage_guard():
    small = position.GridSpec(-3.0, 3.0, 1024)
    with pytest.raises(GridError):
        position.ground_wavefunction(ParamPoint(alpha=2.0), small)


def test_hermite_functions_orthonormal():
    phi = position.hermite_functions(GRID.x, 12)
    G = phi @ phi.T * GRID.h
    assert np.allclose(G, np.eye(12), atol=1e-12)


@pytest.mark.parametrize("R", [ParamPoint(alpha=0.3 + 0.1j), ParamPoint(m=1.2, omega=0.9, alpha=0.2, beta=0.2 - 0.15j)])
def test_grid_matches_fock_ground_state(R):
    assert position.fock_grid_overlap(0, R, GRID) == pytest.approx(1.0, abs=1e-10)
    assert position.fock_grid_overlap(1, R, GRID) < 1e-10


def test_coherent_state_moments():
    R = ParamPoint(alpha=0.5)
    mean, var = position.position_moments(position.ground_wavefunction(R, GRID), GRID)
    assert mean == pytest.approx(math.sqrt(2) * 0.5, abs=1e-8)
    assert var == pytest.approx(0.5, abs=1e-8)


def test_squeezed_variance_matches_fock():
    R = ParamPoint(beta=0.3j)
    _, var_grid = position.position_moments(position.ground_wavefunction(R, GRID), GRID)
    _, var_fock = position.position_moments(position.fock_to_grid(dfm.eigenstate(0, R, 80), GRID), GRID)
    assert var_grid == pytest.approx(var_fock, abs=1e-9)


def test_gamma0_grid_matches_fock_on_circles():
    a_loop = loops.circle(ParamPoint(), ("alpha1", "alpha2"), 0.5, 200)
    b_loop = loops.circle(ParamPoint(), ("beta1", "beta2"), 0.3, 200)
    assert position.gamma0_grid(a_loop, GRID) == pytest.approx(berry.wilson_loop_phase(0, a_loop, 60), abs=2e-3)
    assert position.gamma0_grid(b_loop, GRID) == pytest.approx(berry.wilson_loop_phase(0, b_loop, 60), abs=2e-3)


def test_gamma0_connection_independent_route():
    b_loop = loops.circle(ParamPoint(), ("beta1", "beta2"), 0.3, 200)
    assert position.gamma0_connection(b_loop, GRID) == pytest.approx(-2 * math.pi * math.sinh(0.3) ** 2 / 2, abs=2e-3)


@pytest.mark.parametrize(
    "R, dR",
    [
        (ParamPoint(beta=0.2j), [0.01, 0, 0, 0, 0]),
        (ParamPoint(m=1.1, alpha=0.1, beta=0.2 + 0.25j), [0.01, 0, 0, 0.004, -0.007]),
        (ParamPoint(beta=-0.3 + 0.1j), [0, 0.02, 0.01, 0.003, 0.002]),
    ],
)
def test_commutator_form_matches_matrix(R, dR):
    scalar, resid = position.commutator_matrix_scalar(R, dR)
    assert abs(scalar - position.commutator_one_form(R, dR)) < 1e-6
    assert resid < 1e-8


def test_commutator_form_vanishes_for_alpha_moves():
    assert position.commutator_one_form(ParamPoint(beta=0.2), [0, 0.1, 0.2, 0, 0]) == 0


def test_gamma1_from_gamma0():
    b_loop = loops.circle(ParamPoint(), ("beta1", "beta2"), 0.3, 200)
    g0 = position.gamma0_grid(b_loop, GRID)
    g1 = position.gamma1_from_gamma0(b_loop, GRID)
    assert g1 - g0 == pytest.approx(-2 * math.pi * math.sinh(0.3) ** 2, abs=1e-3)
    assert g1 == pytest.approx(berry.wilson_loop_phase(1, b_loop, 60), abs=1e-3)


def test_gamma1_equals_gamma0_on_alpha_loop():
    a_loop = loops.circle(ParamPoint(beta=0.1), ("alpha1", "alpha2"), 0.3, 100)
    assert position.gamma1_from_gamma0(a_loop, GRID) == pytest.approx(position.gamma0_grid(a_loop, GRID), abs=1e-14)


def test_grid_null_loops():
    const = loops.constant_loop(ParamPoint(alpha=0.2, beta=0.1j))
    assert position.gamma0_grid(const, GRID) == 0.0
    lam_loop = loops.lissajous(ParamPoint(beta=0.2), {"lam": {"amplitude": 0.4}}, 40)
    assert abs(position.gamma0_grid(lam_loop, GRID)) < 1e-8
