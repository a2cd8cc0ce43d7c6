import math

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import momentum_cat, position_cat, vacuum
from phasespace.analysis import compare_fields, density_moments, phase_space_stats
from phasespace.errors import BoundaryError, EvolutionError, ParameterError
from phasespace.grid import make_balanced_grid, make_grid
from phasespace.lindblad import (
    EvolutionSpec,
    MasterEquation,
    evolve_composed,
    evolve_harmonic_rotation,
    evolve_master_oracle,
    evolve_phase_space_lindblad,
    evolve_position_lindblad,
    evolve_trajectory,
    harmonic_flow,
    rk4_integrate,
)
from phasespace.states import CoherentLabel, cat_state, coherent_state, density_from_pure
from phasespace.transforms import wigner_from_density


def coherent_wigner(grid, x0, p0):
    return wigner_from_density(density_from_pure(coherent_state(CoherentLabel(x0=x0, p0=p0), grid)))


@pytest.fixture
def balanced():
    return make_balanced_grid(256)


@pytest.mark.parametrize("field, value", [("gamma", -0.1), ("mass", 0.0), ("t", -1.0), ("n_steps", 0)])
def test_evolution_spec_validation(field, value):
    with pytest.raises(ValidationError):
        EvolutionSpec(**{field: value})


def test_position_decoherence_damps_off_diagonals(grid):
    rho = position_cat(grid)
    out = evolve_position_lindblad(rho, gamma=0.2, t=2.0)
    assert np.array_equal(out.diagonal(), rho.diagonal())
    i, j = grid.n // 2 + 20, grid.n // 2 - 20
    sep = grid.points[i] - grid.points[j]
    assert out.rho[i, j] == pytest.approx(rho.rho[i, j] * math.exp(-0.2 * sep**2), rel=1e-12)


def test_position_decoherence_rejects_negative_rate(grid):
    with pytest.raises(ParameterError):
        evolve_position_lindblad(vacuum(grid), gamma=-1.0, t=1.0)


def test_phase_space_decoherence_of_vacuum(grid):
    out = evolve_phase_space_lindblad(wigner_from_density(vacuum(grid)), gamma=1.0, t=1.0)
    xx, pp = out.grid.mesh()
    assert np.max(np.abs(out.values - np.exp(-(xx**2 + pp**2) / 3.0) / (3.0 * np.pi))) < 1e-10


def test_phase_space_decoherence_needs_room(grid):
    w = wigner_from_density(position_cat(grid))
    with pytest.raises(BoundaryError):
        evolve_phase_space_lindblad(w, gamma=1.0, t=1.0)


def test_harmonic_flow_is_symplectic():
    flow = harmonic_flow(1.3, 0.7, 0.9)
    assert np.linalg.det(flow) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(flow @ harmonic_flow(1.3, 0.7, -0.9), np.eye(2), atol=1e-12)


def test_quarter_period_turns_clockwise(balanced):
    w = coherent_wigner(balanced, 3.0, 0.0)
    out = evolve_harmonic_rotation(w, omega=1.0, mass=1.0, t=math.pi / 2)
    stats = phase_space_stats(out)
    assert stats.mean_x == pytest.approx(0.0, abs=1e-8)
    assert stats.mean_p == pytest.approx(-3.0, abs=1e-8)
    assert np.max(np.abs(out.values - coherent_wigner(balanced, 0.0, -3.0).values)) < 1e-8


def test_full_period_returns_the_input(balanced):
    w = wigner_from_density(momentum_cat(balanced))
    out = evolve_harmonic_rotation(w, omega=1.0, mass=1.0, t=2.0 * math.pi)
    assert np.max(np.abs(out.values - w.values)) < 1e-8


def test_rotation_keeps_the_negativity_of_the_rotated_state(grid):
    t = 0.7
    c, s = math.cos(t), math.sin(t)
    w = wigner_from_density(position_cat(grid))
    out = evolve_harmonic_rotation(w, omega=1.0, mass=1.0, t=t)
    # the clockwise flow carries the branches at (+-3, 0) to +-(3 cos t, -3 sin t)
    rotated_cat = cat_state(CoherentLabel(x0=3 * c, p0=-3 * s), CoherentLabel(x0=-3 * c, p0=3 * s), 0.0, grid)
    exact = wigner_from_density(density_from_pure(rotated_cat))
    assert np.max(np.abs(out.values - exact.values)) < 1e-8
    expected = phase_space_stats(exact).negativity_volume
    assert phase_space_stats(out).negativity_volume == pytest.approx(expected, abs=1e-6)


def test_anisotropic_rotation_follows_the_flow(balanced):
    w = coherent_wigner(balanced, 2.0, 0.0)
    out = evolve_harmonic_rotation(w, omega=2.0, mass=1.0, t=math.pi / 4)
    stats = phase_space_stats(out)
    # quarter period of omega = 2: x -> p/(m omega), p -> -m omega x
    assert stats.mean_x == pytest.approx(0.0, abs=1e-8)
    assert stats.mean_p == pytest.approx(-4.0, abs=1e-8)
    assert stats.purity == pytest.approx(1.0, abs=1e-8)


def test_spline_rotation_is_close_to_shear_rotation(balanced):
    w = coherent_wigner(balanced, 3.0, 0.0)
    shear = evolve_harmonic_rotation(w, 1.0, 1.0, 1.0)
    spline = evolve_harmonic_rotation(w, 1.0, 1.0, 1.0, method="spline")
    assert np.max(np.abs(shear.values - spline.values)) < 1e-3


def test_rotation_parameter_checks(balanced):
    w = coherent_wigner(balanced, 0.0, 0.0)
    with pytest.raises(ParameterError):
        evolve_harmonic_rotation(w, 0.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        evolve_harmonic_rotation(w, 1.0, 1.0, 1.0, method="nearest")


def test_rotation_of_orbit_leaving_the_grid():
    g = make_grid(128, 10.0)
    w = coherent_wigner(g, 4.5, 3.0)
    with pytest.raises(BoundaryError):
        evolve_harmonic_rotation(w, 1.0, 1.0, 0.5)


def test_composed_at_time_zero_is_a_copy(grid):
    w = wigner_from_density(vacuum(grid))
    out = evolve_composed(w, EvolutionSpec(gamma=1.0, t=0.0))
    assert np.array_equal(out.values, w.values)
    assert out.values is not w.values


def test_composed_position_mode_without_hamiltonian(grid):
    rho = position_cat(grid)
    spec = EvolutionSpec(gamma=0.2, t=1.0, mode="position_decoherence")
    out = evolve_composed(wigner_from_density(rho), spec)
    expected = wigner_from_density(evolve_position_lindblad(rho, 0.2, 1.0))
    assert np.max(np.abs(out.values - expected.values)) < 1e-12


def test_composed_phase_mode_without_hamiltonian(wide_grid):
    w = wigner_from_density(position_cat(wide_grid))
    out = evolve_composed(w, EvolutionSpec(gamma=0.1, t=2.0))
    assert np.array_equal(out.values, evolve_phase_space_lindblad(w, 0.1, 2.0).values)


def test_composed_phase_mode_with_unit_oscillator_is_exact(balanced):
    w = wigner_from_density(momentum_cat(balanced))
    spec = EvolutionSpec(gamma=0.1, omega=2.0, mass=0.5, t=1.0)
    out = evolve_composed(w, spec)
    expected = evolve_phase_space_lindblad(evolve_harmonic_rotation(w, 2.0, 0.5, 1.0), 0.1, 1.0)
    assert np.max(np.abs(out.values - expected.values)) < 1e-12


def test_step_check_rejects_coarse_splitting(balanced):
    w = coherent_wigner(balanced, 2.0, 0.0)
    spec = EvolutionSpec(gamma=0.2, omega=1.0, mass=1.0, t=1.0, mode="position_decoherence", n_steps=1)
    with pytest.raises(EvolutionError):
        evolve_composed(w, spec, check_steps=True)
    fine = evolve_composed(w, spec.model_copy(update={"n_steps": 64}), check_steps=True)
    assert fine.integral() == pytest.approx(1.0, abs=1e-10)


def test_strang_phase_mode_with_anisotropic_oscillator(balanced):
    w = coherent_wigner(balanced, 1.0, 0.0)
    spec = EvolutionSpec(gamma=0.1, omega=2.0, mass=1.0, t=1.0, n_steps=64)
    out = evolve_composed(w, spec, check_steps=True)
    stats = phase_space_stats(out)
    assert stats.trace == pytest.approx(1.0, abs=1e-10)
    assert stats.purity < 1.0


def test_trajectory_snapshots(wide_grid):
    w = wigner_from_density(momentum_cat(wide_grid))
    spec = EvolutionSpec(gamma=0.1, n_steps=10)
    snaps = evolve_trajectory(w, spec, [0.0, 0.5, 1.0])
    assert len(snaps) == 3
    assert np.array_equal(snaps[0].values, w.values)
    direct = evolve_composed(w, spec.model_copy(update={"t": 1.0}))
    assert np.max(np.abs(snaps[2].values - direct.values)) < 1e-12


def test_purity_falls_along_a_trajectory(wide_grid):
    w = wigner_from_density(position_cat(wide_grid))
    snaps = evolve_trajectory(w, EvolutionSpec(gamma=0.1), [0.0, 1.0, 2.0, 3.0, 4.0])
    purities = [phase_space_stats(s).purity for s in snaps]
    assert all(b < a for a, b in zip(purities, purities[1:]))


def test_trajectory_rejects_unsorted_times(grid):
    w = wigner_from_density(vacuum(grid))
    with pytest.raises(ParameterError):
        evolve_trajectory(w, EvolutionSpec(gamma=0.1), [1.0, 0.5])


def test_master_equation_preserves_trace(grid):
    rho = momentum_cat(grid)
    spec = EvolutionSpec(gamma=0.3, omega=1.0, t=1.0)
    drho = MasterEquation(grid, spec).rhs(rho.rho)
    assert abs(np.trace(drho)) * grid.dx < 1e-10


def test_rk4_on_exponential_decay():
    y = rk4_integrate(lambda v: -v, np.array([1.0 + 0j]), 1.0, 0.01)
    assert y[0].real == pytest.approx(math.exp(-1.0), abs=1e-9)


def test_oracle_rotates_coherent_state():
    g = make_grid(80, 10.0)
    rho = density_from_pure(coherent_state(CoherentLabel(x0=3.0), g))
    spec = EvolutionSpec(omega=1.0, mass=1.0, t=math.pi / 2)
    out = evolve_master_oracle(rho, spec, dt=0.002)
    moments = density_moments(out)
    assert moments.mean_x == pytest.approx(0.0, abs=1e-4)
    assert moments.mean_p == pytest.approx(-3.0, abs=1e-4)
    assert out.purity() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "mode, var_x", [("position_decoherence", 0.5), ("phase_space_decoherence", 1.5)]
)
def test_oracle_heats_the_vacuum(mode, var_x):
    g = make_grid(64, 8.0)
    out = evolve_master_oracle(vacuum(g), EvolutionSpec(gamma=1.0, t=1.0, mode=mode))
    moments = density_moments(out)
    assert moments.trace == pytest.approx(1.0, abs=1e-8)
    assert moments.var_x == pytest.approx(var_x, abs=1e-5)
    assert moments.var_p == pytest.approx(1.5, abs=1e-5)


def test_oracle_rejects_bad_step(grid):
    with pytest.raises(ParameterError):
        evolve_master_oracle(vacuum(grid), EvolutionSpec(gamma=0.1, t=1.0), dt=0.0)


@pytest.mark.slow
def test_oracle_matches_heat_kernel_for_momentum_cat():
    g = make_grid(160, 10.0)
    rho = momentum_cat(g)
    out = evolve_master_oracle(rho, EvolutionSpec(gamma=0.1, t=1.0))
    analytic = evolve_phase_space_lindblad(wigner_from_density(rho), 0.1, 1.0)
    assert compare_fields(wigner_from_density(out), analytic)["l2"] <= 1e-4
