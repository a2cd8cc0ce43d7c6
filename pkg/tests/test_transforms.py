import math

import numpy as np
import pytest
from scipy.special import eval_laguerre

from conftest import STATES, fock, momentum_cat, position_cat, vacuum
from phasespace.errors import GridError, StateError
from phasespace.grid import Field2D, PhaseSpaceGrid, make_grid
from phasespace.states import DensityMatrix
from phasespace.transforms import (
    CharacteristicFunction,
    HusimiFunction,
    WignerFunction,
    characteristic_from_wigner,
    density_from_wigner,
    husimi_from_density,
    marginals,
    resample_wigner,
    wigner_from_characteristic,
    wigner_from_density,
)


@pytest.mark.parametrize("name", sorted(STATES))
def test_wigner_is_normalized_and_bounded(grid, name):
    w = wigner_from_density(STATES[name](grid))
    assert isinstance(w, WignerFunction)
    assert w.integral() == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(w.values)) <= 1.0 / np.pi + 1e-6


@pytest.mark.parametrize("name", sorted(STATES))
def test_density_wigner_round_trip(grid, name):
    rho = STATES[name](grid)
    back = density_from_wigner(wigner_from_density(rho))
    assert np.max(np.abs(back.rho - rho.rho)) < 1e-8


def test_vacuum_wigner_closed_form(grid):
    w = wigner_from_density(vacuum(grid))
    xx, pp = w.grid.mesh()
    assert np.max(np.abs(w.values - np.exp(-(xx**2) - pp**2) / np.pi)) < 1e-10


def test_fock_wigner_closed_form(grid):
    n = 3
    w = wigner_from_density(fock(grid, n))
    xx, pp = w.grid.mesh()
    r2 = xx**2 + pp**2
    expected = (-1) ** n * eval_laguerre(n, 2.0 * r2) * np.exp(-r2) / np.pi
    assert np.max(np.abs(w.values - expected)) < 1e-9
    assert w.values[grid.n // 2, w.grid.gp.n // 2] == pytest.approx(-1.0 / np.pi, abs=1e-9)


def test_position_cat_interference_fringes(grid):
    w = wigner_from_density(position_cat(grid))
    p = w.grid.gp.points
    e = math.exp(-9.0)
    expected = np.exp(-(p**2)) * (np.cos(6.0 * p) + e) / (np.pi * (1.0 + e))
    assert np.max(np.abs(w.values[grid.n // 2] - expected)) < 1e-9
    assert w.values.min() == pytest.approx(expected.min(), abs=1e-3)
    assert w.values.min() < -0.24


def test_marginals_match_position_and_momentum_densities(grid):
    rho = momentum_cat(grid)
    w = wigner_from_density(rho)
    px, pp = marginals(w)
    assert np.max(np.abs(px - rho.diagonal())) < 1e-10

    # momentum amplitudes by direct quadrature of the leading eigenvector
    psi = rho.rho[:, grid.n // 2] / np.sqrt(rho.rho[grid.n // 2, grid.n // 2])
    p = w.grid.gp.points
    phi = np.exp(-1j * np.outer(p, grid.points)) @ psi * grid.dx / np.sqrt(2.0 * np.pi)
    assert np.max(np.abs(pp - np.abs(phi) ** 2)) < 1e-8


def test_vacuum_husimi_has_unit_variance(grid):
    q = husimi_from_density(vacuum(grid))
    assert isinstance(q, HusimiFunction)
    xx, pp = q.grid.mesh()
    assert np.max(np.abs(q.values - np.exp(-0.5 * (xx**2 + pp**2)) / (2.0 * np.pi))) < 1e-10


def test_husimi_of_cat_is_non_negative(grid):
    q = husimi_from_density(position_cat(grid))
    assert q.values.min() > -1e-10
    assert q.integral() == pytest.approx(1.0, abs=1e-10)


def test_husimi_rejects_bad_sigma(grid):
    with pytest.raises(StateError):
        husimi_from_density(vacuum(grid), sigma=0.0)


def test_vacuum_characteristic_function(grid):
    chi = characteristic_from_wigner(wigner_from_density(vacuum(grid)))
    assert isinstance(chi, CharacteristicFunction)
    qq, kk = chi.grid.mesh()
    expected = np.exp(-(qq**2 + kk**2) / 4.0) / (2.0 * np.pi)
    assert np.max(np.abs(chi.values - expected)) < 1e-10


def test_characteristic_round_trip(grid):
    w = wigner_from_density(position_cat(grid))
    chi = characteristic_from_wigner(w)
    back = wigner_from_characteristic(chi)
    assert back.grid.matches(w.grid)
    assert np.max(np.abs(back.values - w.values)) < 1e-10
    explicit = wigner_from_characteristic(chi, w.grid)
    assert np.max(np.abs(explicit.values - w.values)) < 1e-10


def test_density_from_wigner_requires_dual_momentum_axis(grid):
    w = wigner_from_density(vacuum(grid))
    wrong = WignerFunction(grid=PhaseSpaceGrid(gx=grid, gp=grid), values=w.values)
    with pytest.raises(GridError):
        density_from_wigner(wrong)


def test_wigner_rejects_non_hermitian_input(grid):
    rho = vacuum(grid).rho.copy()
    rho[0, 1] += 1e-3
    with pytest.raises(StateError):
        wigner_from_density(DensityMatrix(grid=grid, rho=rho))


def test_resample_wigner_onto_user_grid(grid):
    w = wigner_from_density(vacuum(grid))
    gp = make_grid(64, 5.0)
    out = resample_wigner(w, gp)
    assert type(out) is Field2D
    assert out.grid.gp.matches(gp)
    xx, pp = out.grid.mesh()
    assert np.max(np.abs(out.values - np.exp(-(xx**2) - pp**2) / np.pi)) < 1e-4
