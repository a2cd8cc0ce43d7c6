"""
Uniform position and phase-space lattices, their Fourier duals, and the
spectral Gaussian convolution every other module builds on.

Samples sit at x_i = x_min + i*dx, i = 0..n-1. Two-dimensional fields are
stored row-major with x as the slow axis.
"""

import logging
from typing import Tuple

import numpy as np
import scipy.fft as sfft
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .errors import GridError, ParameterError, StateError
from .settings import fft_workers, get_settings

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8


class Grid1D(BaseModel):
    """Uniform sampling of one axis"""

    model_config = ConfigDict(frozen=True)

    n: int
    x_min: float
    x_max: float

    @model_validator(mode="after")
    def _check_extent(self):
        if self.n < MIN_SAMPLES:
            raise GridError(f"need at least {MIN_SAMPLES} samples, got {self.n}")
        if not self.x_max > self.x_min:
            raise GridError(f"empty domain [{self.x_min}, {self.x_max})")
        return self

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def last(self) -> float:
        return self.x_min + self.dx * (self.n - 1)

    def matches(self, other: "Grid1D") -> bool:
        return (
            self.n == other.n
            and np.isclose(self.x_min, other.x_min, rtol=0, atol=1e-12 * self.dx)
            and np.isclose(self.x_max, other.x_max, rtol=0, atol=1e-12 * self.dx)
        )


class PhaseSpaceGrid(BaseModel):
    """Product lattice for (x, p); both axes use the same scaled units"""

    model_config = ConfigDict(frozen=True)

    gx: Grid1D
    gp: Grid1D

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.gx.n, self.gp.n)

    @property
    def cell_area(self) -> float:
        return self.gx.dx * self.gp.dx

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.gx.points, self.gp.points, indexing="ij")

    def matches(self, other: "PhaseSpaceGrid") -> bool:
        return self.gx.matches(other.gx) and self.gp.matches(other.gp)


class Field2D(BaseModel):
    """Real or complex samples on a phase-space grid"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: PhaseSpaceGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v):
        return np.asarray(v)

    @model_validator(mode="after")
    def _check_shape(self):
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"{type(self).__name__} has {self.values.shape} samples, grid expects {self.grid.shape}"
            )
        return self

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def integral(self) -> complex | float:
        return self.values.sum() * self.grid.cell_area

    def with_values(self, values: np.ndarray):
        """Same field type and grid, new samples"""
        return type(self)(grid=self.grid, values=values)


def make_grid(n: int, half_width: float) -> Grid1D:
    """Symmetric grid on [-half_width, half_width) with spacing 2*half_width/n"""
    if n < MIN_SAMPLES:
        raise GridError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if not half_width > 0:
        raise GridError(f"half_width must be positive, got {half_width}")
    return Grid1D(n=n, x_min=-half_width, x_max=half_width)


def make_balanced_grid(n: int) -> Grid1D:
    """
    Symmetric grid whose Wigner momentum lattice coincides with the position
    lattice: dx = pi/(n*dx), i.e. half_width = sqrt(pi*n)/2.
    """
    return make_grid(n, 0.5 * np.sqrt(np.pi * n))


def default_grid() -> Grid1D:
    cfg = get_settings().grid
    return make_grid(cfg.n, cfg.half_width)


def fourier_dual(g: Grid1D) -> Grid1D:
    """Centered dual lattice with spacing 2*pi/(n*dx)"""
    dq = 2.0 * np.pi / (g.n * g.dx)
    q_min = -(g.n // 2) * dq
    return Grid1D(n=g.n, x_min=q_min, x_max=q_min + g.n * dq)


def wigner_momentum_grid(g: Grid1D) -> Grid1D:
    """
    Momentum lattice produced by the Wigner transform over the half-coordinate
    nu = k*dx: spacing pi/(n*dx), extent [-pi/(2dx), pi/(2dx)).
    """
    dp = np.pi / (g.n * g.dx)
    p_min = -(g.n // 2) * dp
    return Grid1D(n=g.n, x_min=p_min, x_max=p_min + g.n * dp)


def phase_space_grid_for(g: Grid1D) -> PhaseSpaceGrid:
    return PhaseSpaceGrid(gx=g, gp=wigner_momentum_grid(g))


def dual_phase_space_grid(grid: PhaseSpaceGrid) -> PhaseSpaceGrid:
    return PhaseSpaceGrid(gx=fourier_dual(grid.gx), gp=fourier_dual(grid.gp))


def angular_frequencies(g: Grid1D) -> np.ndarray:
    """Wave numbers 2*pi*k/(n*dx) in FFT order"""
    return 2.0 * np.pi * sfft.fftfreq(g.n, d=g.dx)


def _centered_dft(values: np.ndarray, g: Grid1D, axis: int, inverse: bool) -> np.ndarray:
    # Continuous-normalized transform between g and fourier_dual(g) along one axis.
    n = g.n
    c = n // 2
    shape = [1] * values.ndim
    shape[axis] = n
    idx = np.arange(n).reshape(shape)
    q = fourier_dual(g).points.reshape(shape)
    workers = fft_workers()
    if not inverse:
        twisted = values * np.exp(2j * np.pi * c * idx / n)
        return g.dx * np.exp(-1j * q * g.x_min) * sfft.fft(twisted, axis=axis, workers=workers)
    dq = 2.0 * np.pi / (n * g.dx)
    untwisted = sfft.ifft(values * np.exp(1j * q * g.x_min), axis=axis, workers=workers)
    return (dq * n / (2.0 * np.pi)) * np.exp(-2j * np.pi * c * idx / n) * untwisted


def spectral_transform(f: Field2D) -> Field2D:
    """F(q, k) = sum f(x, p) e^{-i(qx + kp)} dx dp on the dual grid"""
    values = _centered_dft(np.asarray(f.values, dtype=complex), f.grid.gx, axis=0, inverse=False)
    values = _centered_dft(values, f.grid.gp, axis=1, inverse=False)
    return Field2D(grid=dual_phase_space_grid(f.grid), values=values)


def inverse_spectral_transform(F: Field2D, grid: PhaseSpaceGrid) -> Field2D:
    """Inverse of spectral_transform; `grid` is the primal grid F was computed from"""
    if not dual_phase_space_grid(grid).matches(F.grid):
        raise GridError("field does not live on the dual of the requested grid")
    values = _centered_dft(np.asarray(F.values, dtype=complex), grid.gx, axis=0, inverse=True)
    values = _centered_dft(values, grid.gp, axis=1, inverse=True)
    return Field2D(grid=grid, values=values)


def boundary_magnitude(values: np.ndarray) -> float:
    """Largest edge sample relative to the peak magnitude"""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return 0.0
    edges = [mag[0, :], mag[-1, :], mag[:, 0], mag[:, -1]] if mag.ndim == 2 else [mag[:1], mag[-1:]]
    return float(max(e.max() for e in edges) / peak)


def warn_on_boundary(values: np.ndarray, where: str) -> bool:
    """Log a warning when the field has not decayed at the domain edge"""
    level = boundary_magnitude(values)
    tol = get_settings().numerics.boundary_tol
    if level > tol:
        logger.warning(
            f"{where}: boundary magnitude {level:.2e} exceeds {tol:.0e}, periodic wrap may contaminate the result"
        )
        return True
    return False


def support_margin_1d(profile: np.ndarray, g: Grid1D, tol: float | None = None) -> float:
    """Distance from the support of |profile| (relative threshold) to the nearest grid edge"""
    if tol is None:
        tol = get_settings().numerics.support_tol
    mag = np.abs(profile)
    peak = mag.max()
    if peak == 0:
        return g.last - g.x_min
    inside = np.nonzero(mag > tol * peak)[0]
    x = g.points
    return float(min(x[inside[0]] - g.x_min, g.last - x[inside[-1]]))


def support_margin(f: Field2D, tol: float | None = None) -> Tuple[float, float]:
    """Per-axis distance from the support of a 2-D field to the grid edges"""
    mag = np.abs(f.values)
    return (
        support_margin_1d(mag.max(axis=1), f.grid.gx, tol),
        support_margin_1d(mag.max(axis=0), f.grid.gp, tol),
    )


def gaussian_convolve(f: Field2D, var_x: float, var_p: float) -> Field2D:
    """
    Convolve with the normalized Gaussian of per-axis variances (var_x, var_p).

    Applied spectrally: the transform is multiplied by
    exp(-var_x*q^2/2 - var_p*k^2/2). The convolution is periodic, so the field
    should have decayed at the domain edges; a warning is logged otherwise.
    """
    if var_x < 0 or var_p < 0:
        raise ParameterError(f"variances must be non-negative, got ({var_x}, {var_p})")
    values = np.asarray(f.values)
    if not np.all(np.isfinite(values)):
        raise StateError("field contains non-finite samples")

    axes = [axis for axis, var in ((0, var_x), (1, var_p)) if var > 0]
    if not axes:
        return f.with_values(values.copy())
    warn_on_boundary(values, "gaussian_convolve")
    logger.debug(f"gaussian_convolve: shape={values.shape} var=({var_x}, {var_p})")

    qx = angular_frequencies(f.grid.gx)[:, None]
    qp = angular_frequencies(f.grid.gp)[None, :]
    kernel = np.exp(-0.5 * var_x * qx**2 - 0.5 * var_p * qp**2)
    if len(axes) == 1:
        kernel = kernel[:, :1] if axes == [0] else kernel[:1, :]

    workers = fft_workers()
    spectrum = sfft.fftn(values, axes=axes, workers=workers) * kernel
    out = sfft.ifftn(spectrum, axes=axes, workers=workers)
    if not np.iscomplexobj(values):
        out = out.real
    return f.with_values(out)
