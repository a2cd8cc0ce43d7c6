"""Scalar diagnostics of phase-space fields and density matrices."""

import logging
from typing import Dict

import numpy as np
import scipy.fft as sfft
from pydantic import BaseModel, Field

from .errors import GridError, StateError
from .grid import Field2D, angular_frequencies
from .settings import fft_workers
from .states import DensityMatrix
from .transforms import WignerFunction, marginals

logger = logging.getLogger(__name__)


class StateMetrics(BaseModel):
    """Moments and classicality indicators of a Wigner function"""

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    negativity_volume: float = Field(ge=0)
    purity: float
    min_wigner: float
    trace: float
    l2_norm: float = Field(ge=0)


class Moments(BaseModel):
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    trace: float


def phase_space_stats(w: WignerFunction) -> StateMetrics:
    """
    Grid quadrature of the usual diagnostics. Moments are normalized by the
    trace; negativity volume is sum (|W| - W)/2 dx dp and purity 2 pi sum W^2 dx dp.
    """
    values = np.asarray(w.values, dtype=float)
    area = w.grid.cell_area
    trace = float(values.sum() * area)
    if trace == 0 or not np.isfinite(trace):
        raise StateError(f"cannot normalize moments of a field with trace {trace}")
    px, pp = marginals(w)
    x, p = w.grid.gx.points, w.grid.gp.points
    dx, dp = w.grid.gx.dx, w.grid.gp.dx
    mean_x = float(np.sum(x * px) * dx / trace)
    mean_p = float(np.sum(p * pp) * dp / trace)
    var_x = float(np.sum((x - mean_x) ** 2 * px) * dx / trace)
    var_p = float(np.sum((p - mean_p) ** 2 * pp) * dp / trace)
    squares = float(np.sum(values**2) * area)
    return StateMetrics(
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=var_x,
        var_p=var_p,
        negativity_volume=max(float(np.sum(np.abs(values) - values) * 0.5 * area), 0.0),
        purity=2.0 * np.pi * squares,
        min_wigner=float(values.min()),
        trace=trace,
        l2_norm=float(np.sqrt(squares)),
    )


def compare_fields(a: Field2D, b: Field2D) -> Dict[str, float]:
    """Discrete L2 (area-weighted) and L-infinity norms of a - b"""
    if not a.grid.matches(b.grid):
        raise GridError("fields live on different grids")
    diff = np.abs(np.asarray(a.values) - np.asarray(b.values))
    return {
        "l2": float(np.sqrt(np.sum(diff**2) * a.grid.cell_area)),
        "linf": float(diff.max()),
    }


def density_moments(rho: DensityMatrix) -> Moments:
    """<x>, <p> and variances straight from rho; p acts spectrally along the row index"""
    g = rho.grid
    x = g.points
    k = angular_frequencies(g)
    trace = rho.trace()
    workers = fft_workers()
    spectrum = sfft.fft(rho.rho, axis=0, workers=workers)
    p_rho = sfft.ifft(k[:, None] * spectrum, axis=0, workers=workers)
    p2_rho = sfft.ifft((k**2)[:, None] * spectrum, axis=0, workers=workers)
    diag = rho.diagonal()
    mean_x = float(np.sum(x * diag) * g.dx / trace)
    mean_p = float(np.real(np.trace(p_rho)) * g.dx / trace)
    var_x = float(np.sum((x - mean_x) ** 2 * diag) * g.dx / trace)
    var_p = float(np.real(np.trace(p2_rho)) * g.dx / trace) - mean_p**2
    return Moments(mean_x=mean_x, mean_p=mean_p, var_x=var_x, var_p=var_p, trace=trace)


def density_purity(rho: DensityMatrix) -> float:
    return rho.purity()
