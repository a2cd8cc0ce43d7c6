"""
The coherent-state POVM on phase space.

Effects are Pi(z) = |z><z|/(2 pi). A recorded measurement returns the
coherent state at the detected point; an unrecorded one averages those
projectors with the Husimi density, which in position space damps the
off-diagonals and Gaussian-averages along every diagonal.
"""

import logging

import numpy as np
import scipy.fft as sfft
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import BoundaryError, GridError, ParameterError
from .grid import angular_frequencies, gaussian_convolve, support_margin_1d, warn_on_boundary
from .settings import fft_workers
from .states import CoherentLabel, DensityMatrix, WaveFunction, coherent_amplitudes, density_from_pure
from .transforms import WignerFunction, husimi_from_density

logger = logging.getLogger(__name__)

MARGIN_STDDEVS = 4.0
AVERAGE_CHUNK = 10_000


class PhaseSpaceRegion(BaseModel):
    """Axis-aligned rectangle; infinite bounds are clipped to the grid"""

    model_config = ConfigDict(frozen=True)

    x_lo: float = -np.inf
    x_hi: float = np.inf
    p_lo: float = -np.inf
    p_hi: float = np.inf

    @model_validator(mode="after")
    def _check_order(self):
        if not (self.x_lo < self.x_hi and self.p_lo < self.p_hi):
            raise ValueError("region bounds must satisfy x_lo < x_hi and p_lo < p_hi")
        return self


class MeasurementRecord(BaseModel):
    """Detected phase-space point and the coherent state the system is left in"""

    model_config = ConfigDict(frozen=True)

    outcome: CoherentLabel
    post_state: DensityMatrix


def _cell_overlap(centers: np.ndarray, step: float, lo: float, hi: float) -> np.ndarray:
    left = np.maximum(centers - 0.5 * step, lo)
    right = np.minimum(centers + 0.5 * step, hi)
    return np.clip(right - left, 0.0, None) / step


def povm_probability(rho: DensityMatrix, region: PhaseSpaceRegion, sigma: float = 1.0) -> float:
    """P(z in A): the Husimi density integrated over the region, cell by cell"""
    q = husimi_from_density(rho, sigma)
    gx, gp = q.grid.gx, q.grid.gp
    lo_x, hi_x = gx.x_min, gx.x_min + gx.n * gx.dx
    lo_p, hi_p = gp.x_min, gp.x_min + gp.n * gp.dx
    for name, value, lo, hi in (
        ("x_lo", region.x_lo, lo_x, hi_x),
        ("x_hi", region.x_hi, lo_x, hi_x),
        ("p_lo", region.p_lo, lo_p, hi_p),
        ("p_hi", region.p_hi, lo_p, hi_p),
    ):
        if np.isfinite(value) and not (lo - 1e-12 <= value <= hi + 1e-12):
            raise GridError(f"region bound {name}={value} lies outside the grid [{lo}, {hi}]")

    wx = _cell_overlap(gx.points, gx.dx, region.x_lo, region.x_hi)
    wp = _cell_overlap(gp.points, gp.dx, region.p_lo, region.p_hi)
    prob = float(wx @ q.values @ wp) * q.grid.cell_area
    return min(max(prob, 0.0), 1.0)


def povm_channel(rho: DensityMatrix, m: int, sigma: float = 1.0) -> DensityMatrix:
    """
    m unrecorded measurements in one step:
    rho_m(x, y) = e^{-m (x-y)^2/(2 sigma^2)} / sqrt(2 pi m sigma^2)
                  * int e^{-l^2/(2 m sigma^2)} rho(x + l, y + l) dl.

    Computed in rotated coordinates: spectral convolution along each diagonal
    x - y = const, then pointwise damping across diagonals.
    """
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError(f"the channel takes a positive integer iteration count, got {m!r}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    g = rho.grid
    n = g.n
    var_u = m * sigma**2
    margin = support_margin_1d(rho.diagonal(), g)
    needed = MARGIN_STDDEVS * np.sqrt(var_u)
    if margin < needed:
        raise BoundaryError(
            f"state support leaves {margin:.2f} units to the grid edge, diagonal averaging over m={m} needs {needed:.2f}"
        )

    d = np.arange(-(n - 1), n)[:, None]
    a = np.broadcast_to(np.arange(n)[None, :], (2 * n - 1, n))
    b = a - d
    valid = (b >= 0) & (b < n)
    diagonals = np.where(valid, rho.rho[a, np.clip(b, 0, n - 1)], 0.0)

    workers = fft_workers()
    q = angular_frequencies(g)[None, :]
    averaged = sfft.ifft(sfft.fft(diagonals, axis=1, workers=workers) * np.exp(-0.5 * var_u * q**2), axis=1, workers=workers)
    damping = np.exp(-0.5 * (m / sigma**2) * (d * g.dx) ** 2)

    out = np.zeros((n, n), dtype=complex)
    out[a[valid], b[valid]] = (averaged * damping)[valid]
    out = 0.5 * (out + out.conj().T)
    logger.debug(f"povm_channel: m={m} sigma={sigma} n={n}")
    return DensityMatrix(grid=g, rho=out)


def povm_smooth_wigner(w: WignerFunction, m: float, sigma: float = 1.0) -> WignerFunction:
    """Wigner function after m measurements: Gaussian smoothing with variances (m sigma^2, m/sigma^2)"""
    if m < 0:
        raise ParameterError(f"measurement count must be non-negative, got {m}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    smoothed = gaussian_convolve(w, m * sigma**2, m / sigma**2)
    return WignerFunction(grid=w.grid, values=smoothed.values)


def p_function_after_measurement(w: WignerFunction, m: float = 1.0, sigma: float = 1.0) -> WignerFunction:
    """
    Glauber-Sudarshan P-function of povm_smooth_wigner(w, m) for m >= 1/2.
    The Wigner function is the P-function smoothed with m = 1/2, so the answer
    is the (m - 1/2)-smoothed input; no deconvolution is attempted.
    """
    if m < 0.5:
        raise ParameterError(f"the P-function is only available for m >= 1/2, got {m}")
    return povm_smooth_wigner(w, m - 0.5, sigma)


def sample_povm_outcomes(rho: DensityMatrix, n_samples: int, seed: int, sigma: float = 1.0) -> np.ndarray:
    """
    Draw (x0, p0) outcomes from the Husimi density by inverse-CDF sampling on
    the grid. The CDF is interpolated linearly inside the selected cell along
    the fast (p) axis; the x offset inside the cell is uniform.
    """
    if n_samples < 1:
        raise ParameterError(f"need at least one sample, got {n_samples}")
    q = husimi_from_density(rho, sigma)
    weights = np.clip(q.values, 0.0, None).ravel()
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]

    rng = np.random.default_rng(seed)
    u = rng.random(n_samples)
    offsets_x = rng.random(n_samples) - 0.5
    cells = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    lower = np.where(cells > 0, cdf[np.maximum(cells - 1, 0)], 0.0)
    width = cdf[cells] - lower
    frac = np.divide(u - lower, width, out=np.full_like(u, 0.5), where=width > 0)

    ix, ip = np.unravel_index(cells, q.grid.shape)
    gx, gp = q.grid.gx, q.grid.gp
    x0 = gx.points[ix] + offsets_x * gx.dx
    p0 = gp.points[ip] + (frac - 0.5) * gp.dx
    return np.column_stack([x0, p0])


def sample_povm_outcome(rho: DensityMatrix, seed: int, sigma: float = 1.0) -> MeasurementRecord:
    """One recorded measurement; the post-measurement state is the coherent state at the outcome"""
    x0, p0 = sample_povm_outcomes(rho, 1, seed, sigma)[0]
    label = CoherentLabel(x0=float(x0), p0=float(p0), sigma=sigma)
    # outcomes in the tails may sit closer to the edge than coherent_state allows
    amp = coherent_amplitudes(x0, p0, rho.grid, sigma)[:, 0]
    warn_on_boundary(amp, "sample_povm_outcome")
    psi = WaveFunction(grid=rho.grid, amp=amp)
    psi = WaveFunction(grid=rho.grid, amp=amp / np.sqrt(psi.norm()))
    post = density_from_pure(psi)
    logger.info(f"🎯 POVM outcome: x0={x0:.4f} p0={p0:.4f} (seed={seed})")
    return MeasurementRecord(outcome=label, post_state=post)


def unrecorded_average(outcomes: np.ndarray, grid, sigma: float = 1.0) -> DensityMatrix:
    """Average of the coherent post-states |z><z| over sampled outcomes"""
    outcomes = np.asarray(outcomes, dtype=float)
    n = grid.n
    acc = np.zeros((n, n), dtype=complex)
    for start in range(0, len(outcomes), AVERAGE_CHUNK):
        chunk = outcomes[start : start + AVERAGE_CHUNK]
        psi = coherent_amplitudes(chunk[:, 0], chunk[:, 1], grid, sigma)
        acc += psi @ psi.conj().T
    return DensityMatrix(grid=grid, rho=acc / len(outcomes))
