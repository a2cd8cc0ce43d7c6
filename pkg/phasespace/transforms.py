"""
Conversions between density matrices, Wigner functions, Husimi functions and
characteristic functions.

The Wigner momentum axis is the Fourier dual of the half-coordinate lattice
nu = k*dx (see grid.wigner_momentum_grid). Resampling onto any other momentum
grid is the explicit resample_wigner step.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import map_coordinates

from .errors import GridError, StateError
from .grid import (
    Field2D,
    Grid1D,
    PhaseSpaceGrid,
    angular_frequencies,
    dual_phase_space_grid,
    gaussian_convolve,
    inverse_spectral_transform,
    phase_space_grid_for,
    spectral_transform,
    warn_on_boundary,
    wigner_momentum_grid,
)
from .settings import fft_workers
from .states import DensityMatrix

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10


class WignerFunction(Field2D):
    """Real quasi-probability W(x, p); integrates to one, may be negative"""

    @property
    def w(self) -> np.ndarray:
        return self.values


class HusimiFunction(Field2D):
    """Non-negative density Q(x, p) = <z|rho|z>/(2 pi); integrates to one"""

    @property
    def q(self) -> np.ndarray:
        return self.values


class CharacteristicFunction(Field2D):
    """chi(q, k) = (2 pi)^{-1} int e^{-iqx} e^{-ikp} W dx dp on the dual grid"""

    @property
    def chi(self) -> np.ndarray:
        return self.values


def _half_coordinate_offsets(n: int) -> np.ndarray:
    # k in FFT order: 0, 1, ..., -2, -1
    return np.rint(sfft.fftfreq(n, d=1.0 / n)).astype(int)


def wigner_from_density(rho: DensityMatrix) -> WignerFunction:
    """W(x, p) = (1/pi) int rho(x + nu, x - nu) e^{-2 i p nu} d nu, nu on the x lattice"""
    herm = rho.hermiticity_error()
    if herm > HERMITIAN_TOL:
        raise StateError(f"density matrix is not Hermitian (max deviation {herm:.2e})")
    g = rho.grid
    n = g.n
    warn_on_boundary(rho.rho, "wigner_from_density")

    k = _half_coordinate_offsets(n)[None, :]
    i = np.arange(n)[:, None]
    a, b = i + k, i - k
    valid = (a >= 0) & (a < n) & (b >= 0) & (b < n)
    f = np.where(valid, rho.rho[np.clip(a, 0, n - 1), np.clip(b, 0, n - 1)], 0.0)

    spectrum = sfft.fft(f, axis=1, workers=fft_workers())
    w = (g.dx / np.pi) * sfft.fftshift(spectrum, axes=1)
    return WignerFunction(grid=phase_space_grid_for(g), values=w.real)


def density_from_wigner(w: WignerFunction) -> DensityMatrix:
    """
    rho(x, y) = int W((x+y)/2, mu) e^{i mu (x-y)} d mu.

    Midpoints (x+y)/2 fall on the lattice or halfway between two samples; the
    half-step rows are obtained by a spectral shift along x.
    """
    g = w.grid.gx
    if not w.grid.gp.matches(wigner_momentum_grid(g)):
        raise GridError("Wigner momentum axis is not the dual of the position lattice; resample first")
    n = g.n
    dp = w.grid.gp.dx
    workers = fft_workers()
    values = np.asarray(w.values, dtype=float)

    q = angular_frequencies(g)[:, None]
    shifted = sfft.ifft(sfft.fft(values, axis=0, workers=workers) * np.exp(0.5j * q * g.dx), axis=0, workers=workers)

    # rows indexed by s = a + b: even s -> x_{s/2}, odd s -> x_{(s-1)/2} + dx/2
    stacked = np.empty((2 * n - 1, n), dtype=complex)
    stacked[0::2] = values
    stacked[1::2] = shifted.real[: n - 1]
    j = np.arange(n) - n // 2
    stacked[1::2] *= np.exp(1j * np.pi * j / n)[None, :]

    kernel = dp * n * sfft.ifft(sfft.ifftshift(stacked, axes=1), axis=1, workers=workers)

    a = np.arange(n)[:, None]
    b = np.arange(n)[None, :]
    rho = kernel[a + b, ((a - b) // 2) % n]
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(grid=g, rho=rho)


def husimi_from_density(rho: DensityMatrix, sigma: float = 1.0) -> HusimiFunction:
    """
    Q(x0, p0) = <z|rho|z>/(2 pi), obtained as the Wigner function smoothed by
    the Gaussian of per-axis variances (sigma^2/2, 1/(2 sigma^2)).
    """
    if sigma <= 0:
        raise StateError(f"sigma must be positive, got {sigma}")
    w = wigner_from_density(rho)
    smoothed = gaussian_convolve(w, 0.5 * sigma**2, 0.5 / sigma**2)
    return HusimiFunction(grid=w.grid, values=smoothed.values)


def characteristic_from_wigner(w: WignerFunction) -> CharacteristicFunction:
    F = spectral_transform(w)
    return CharacteristicFunction(grid=F.grid, values=F.values / (2.0 * np.pi))


def wigner_from_characteristic(
    chi: CharacteristicFunction, grid: Optional[PhaseSpaceGrid] = None
) -> WignerFunction:
    """Inverse of characteristic_from_wigner; the primal grid defaults to the centered dual of the dual"""
    if grid is None:
        grid = dual_phase_space_grid(chi.grid)
    f = inverse_spectral_transform(chi, grid)
    return WignerFunction(grid=grid, values=(2.0 * np.pi) * f.values.real)


def marginals(w: WignerFunction) -> Tuple[np.ndarray, np.ndarray]:
    """Position density P(x) = int W dp and momentum density P(p) = int W dx"""
    values = np.asarray(w.values)
    return values.sum(axis=1) * w.grid.gp.dx, values.sum(axis=0) * w.grid.gx.dx


def resample_wigner(w: WignerFunction, gp: Grid1D) -> Field2D:
    """
    Bicubic resampling onto a user momentum grid. The result is a plain Field2D:
    it no longer sits on the spectral lattice the inverse transform expects.
    """
    src = w.grid.gp
    x_idx = np.arange(w.grid.gx.n, dtype=float)
    p_idx = (gp.points - src.x_min) / src.dx
    coords = np.meshgrid(x_idx, p_idx, indexing="ij")
    values = map_coordinates(np.asarray(w.values, dtype=float), coords, order=3, mode="constant", cval=0.0)
    logger.debug(f"resample_wigner: {src.n} -> {gp.n} momentum samples")
    return Field2D(grid=PhaseSpaceGrid(gx=w.grid.gx, gp=gp), values=values)
