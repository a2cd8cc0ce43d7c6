import numpy as np
import pytest

from conftest import position_cat, vacuum
from phasespace.analysis import compare_fields, density_moments, density_purity, phase_space_stats
from phasespace.errors import GridError, StateError
from phasespace.grid import Field2D, Grid1D, PhaseSpaceGrid
from phasespace.states import CoherentLabel, coherent_state, density_from_pure, mix
from phasespace.transforms import WignerFunction, wigner_from_density


def test_vacuum_stats(grid):
    stats = phase_space_stats(wigner_from_density(vacuum(grid)))
    assert stats.trace == pytest.approx(1.0, abs=1e-10)
    assert (stats.mean_x, stats.mean_p) == pytest.approx((0.0, 0.0), abs=1e-10)
    assert (stats.var_x, stats.var_p) == pytest.approx((0.5, 0.5), abs=1e-10)
    assert stats.purity == pytest.approx(1.0, abs=1e-10)
    assert stats.negativity_volume < 1e-12


def test_cat_stats_show_negativity(grid):
    stats = phase_space_stats(wigner_from_density(position_cat(grid)))
    assert stats.negativity_volume > 0.1
    assert stats.min_wigner < -0.24
    assert stats.var_x == pytest.approx(0.5 + 9.0 / (1.0 + np.exp(-9.0)), abs=1e-8)


def test_stats_of_empty_field(grid):
    w = wigner_from_density(vacuum(grid))
    with pytest.raises(StateError):
        phase_space_stats(WignerFunction(grid=w.grid, values=np.zeros(w.grid.shape)))


def test_compare_fields_on_unit_cells():
    axis = Grid1D(n=16, x_min=0.0, x_max=4.0)
    ps = PhaseSpaceGrid(gx=axis, gp=axis)
    a = Field2D(grid=ps, values=np.zeros(ps.shape))
    block = np.zeros(ps.shape)
    block[4:8, 4:8] = 1.0
    norms = compare_fields(a, Field2D(grid=ps, values=block))
    assert norms["l2"] == pytest.approx(1.0)
    assert norms["linf"] == pytest.approx(1.0)


def test_compare_fields_needs_matching_grids(grid):
    w = wigner_from_density(vacuum(grid))
    other = PhaseSpaceGrid(gx=grid, gp=grid)
    with pytest.raises(GridError):
        compare_fields(w, Field2D(grid=other, values=w.values))


def test_density_moments_of_coherent_state(grid):
    rho = density_from_pure(coherent_state(CoherentLabel(x0=1.5, p0=-2.0), grid))
    moments = density_moments(rho)
    assert (moments.mean_x, moments.mean_p) == pytest.approx((1.5, -2.0), abs=1e-10)
    assert (moments.var_x, moments.var_p) == pytest.approx((0.5, 0.5), abs=1e-10)
    stats = phase_space_stats(wigner_from_density(rho))
    assert stats.mean_p == pytest.approx(moments.mean_p, abs=1e-10)


def test_density_purity_of_mixture(grid):
    a = density_from_pure(coherent_state(CoherentLabel(x0=3.0), grid))
    b = density_from_pure(coherent_state(CoherentLabel(x0=-3.0), grid))
    assert density_purity(mix([a, b], [0.25, 0.75])) == pytest.approx(0.625, abs=1e-6)
