import json

import numpy as np
import pytest

from phasespace.grid import Grid1D, make_grid
from phasespace.states import (
    CoherentLabel,
    DensityMatrix,
    cat_state,
    coherent_amplitudes,
    coherent_state,
    density_from_pure,
    fock_state,
)


def vacuum(grid: Grid1D) -> DensityMatrix:
    return density_from_pure(coherent_state(CoherentLabel(), grid))


def position_cat(grid: Grid1D, a: float = 3.0) -> DensityMatrix:
    psi = cat_state(CoherentLabel(x0=a), CoherentLabel(x0=-a), 0.0, grid)
    return density_from_pure(psi)


def momentum_cat(grid: Grid1D, a: float = 3.0) -> DensityMatrix:
    psi = cat_state(CoherentLabel(p0=a), CoherentLabel(p0=-a), 0.0, grid)
    return density_from_pure(psi)


def fock(grid: Grid1D, n: int = 3) -> DensityMatrix:
    return density_from_pure(fock_state(n, grid))


STATES = {
    "vacuum": vacuum,
    "position_cat": position_cat,
    "momentum_cat": momentum_cat,
    "fock3": fock,
}


def husimi_by_quadrature(rho: DensityMatrix, p_points: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """<z|rho|z>/(2 pi) summed directly over the position grid, one coherent vector per (x0, p0)"""
    g = rho.grid
    x0 = g.points
    out = np.empty((x0.size, p_points.size))
    for j, p0 in enumerate(p_points):
        phi = coherent_amplitudes(x0, np.full_like(x0, p0), g, sigma)
        out[:, j] = np.real(np.sum(phi.conj() * (rho.rho @ phi), axis=0)) * g.dx**2 / (2.0 * np.pi)
    return out


def gaussian_matrix(points: np.ndarray, var: float, step: float) -> np.ndarray:
    """Quadrature weights of the normalized Gaussian of variance var between grid points"""
    diff = points[:, None] - points[None, :]
    return np.exp(-0.5 * diff**2 / var) / np.sqrt(2.0 * np.pi * var) * step


def convolve_by_quadrature(values: np.ndarray, gx: Grid1D, gp: Grid1D, var_x: float, var_p: float) -> np.ndarray:
    out = values
    if var_x > 0:
        out = gaussian_matrix(gx.points, var_x, gx.dx) @ out
    if var_p > 0:
        out = out @ gaussian_matrix(gp.points, var_p, gp.dx).T
    return out


@pytest.fixture
def grid() -> Grid1D:
    return make_grid(256, 10.0)


@pytest.fixture
def wide_grid() -> Grid1D:
    return make_grid(512, 16.0)


@pytest.fixture
def quiet_config(tmp_path, monkeypatch):
    """Config file with file logging off, selected through PHASEMCP_CONFIG"""
    from phasespace.settings import get_settings

    path = tmp_path / "config.json"
    path.write_text(
        json.dumps(
            {
                "grid": {"n": 128, "half_width": 10.0},
                "output": {"directory": str(tmp_path / "out")},
                "logging": {"level": "INFO", "file": False},
            }
        )
    )
    monkeypatch.setenv("PHASEMCP_CONFIG", str(path))
    get_settings.cache_clear()
    yield path
    get_settings.cache_clear()
