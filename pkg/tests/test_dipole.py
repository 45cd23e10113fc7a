import numpy as np
import pytest

from cavity_gauge.dipole import (
    DoubleWellParams,
    bare_hamiltonian,
    certify_anharmonic,
    dipole_operator,
    solve_double_well,
)
from cavity_gauge.errors import ConvergenceError, ValidationError

# ground energy of -1/2 d^2/dz^2 + z^4/4 from an independent second-order
# finite-difference solve, Richardson-extrapolated over 1001/2001/4001 points
QUARTIC_GROUND = 0.4208049744818618


def test_harmonic_levels_are_evenly_spaced():
    params = DoubleWellParams(potential=lambda z: 0.5 * z**2, grid_halfwidth=10.0)
    m = solve_double_well(params, 6)
    assert np.allclose(m.level_energies, np.arange(6) + 0.5, rtol=0, atol=1e-6)
    assert m.omega_m == pytest.approx(1.0, abs=1e-6)
    # x_{n,n-1} = sqrt(n/2) for the oscillator
    assert m.zeta_eg == pytest.approx(np.sqrt(0.5), abs=1e-6)


def test_quartic_ground_energy_matches_reference():
    params = DoubleWellParams(potential=lambda z: 0.25 * z**4, grid_halfwidth=8.0)
    m = solve_double_well(params, 2)
    assert m.ground_energy == pytest.approx(QUARTIC_GROUND, abs=1e-9)


def test_default_double_well(model):
    w = model.level_energies
    assert np.all(np.diff(w) > 0)
    assert w[:4] == pytest.approx([-1.16957133, -1.08569625, 0.37422696, 1.22119694], abs=1e-7)
    assert model.omega_m == pytest.approx(0.08387507865882027, rel=1e-9)
    assert certify_anharmonic(model) > 10


def test_parity_selection_rule(model):
    z = model.zeta_matrix
    parity = np.add.outer(np.arange(model.levels), np.arange(model.levels)) % 2
    assert np.max(np.abs(z[parity == 0])) < 1e-9 * np.max(np.abs(z))
    assert model.zeta_eg > 0
    assert np.all(np.diag(z, -1) > 0)


def test_eigenvectors_orthonormal(model):
    v = model.vectors
    assert np.max(np.abs(v.T @ v - np.eye(model.levels))) < 1e-10


def test_grid_convergence():
    coarse = solve_double_well(DoubleWellParams(grid_points=1001), 4)
    fine = solve_double_well(DoubleWellParams(grid_points=2001), 4)
    assert np.max(np.abs(coarse.level_energies - fine.level_energies)) < 1e-7


@pytest.mark.parametrize("order", [2, 4, 6, 8])
def test_stencil_orders_agree(order):
    m = solve_double_well(DoubleWellParams(stencil_order=order), 4)
    assert m.omega_m == pytest.approx(0.08387507865882027, rel=1e-4)


def test_normalised_dipole_operator(model):
    zh = dipole_operator(model, 4)
    assert zh[0, 1] == 1.0 and zh[1, 0] == 1.0
    assert np.allclose(zh, zh.T)
    assert np.allclose(np.diag(zh), 0, atol=1e-10)
    with pytest.raises(ValidationError):
        dipole_operator(model, model.levels + 1)


def test_bare_hamiltonian(model):
    assert np.array_equal(np.diag(bare_hamiltonian(model, 3)), model.level_energies[:3])


def test_harmonic_fails_anharmonicity_certificate():
    m = solve_double_well(DoubleWellParams(potential=lambda z: 0.5 * z**2, grid_halfwidth=10.0), 4)
    assert m.anharmonicity() < 1e-5
    with pytest.raises(ValidationError):
        certify_anharmonic(m)


def test_narrow_box_is_rejected():
    with pytest.raises(ConvergenceError) as info:
        solve_double_well(DoubleWellParams(grid_halfwidth=2.0), 2)
    assert "boundary_ratio" in info.value.diagnostics


@pytest.mark.parametrize("kw", [dict(grid_points=2000), dict(stencil_order=3),
                                dict(energy_scale=0.0), dict(grid_halfwidth=-1.0)])
def test_invalid_params(kw):
    with pytest.raises(ValidationError):
        DoubleWellParams(**kw)


def test_too_many_levels_for_grid():
    with pytest.raises(ValidationError):
        solve_double_well(DoubleWellParams(grid_points=101), 11)
