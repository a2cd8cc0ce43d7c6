"""
Pure states on a position grid: coherent, cat and Fock states, and their
density matrices.

Coherent states follow <x|z> = pi^{-1/4} exp(-(x-q)^2/2 + i p (x-q)) with
z = (q + i p)/sqrt(2); the squeezed variant replaces the width 1 by sigma.
"""

import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import GridError, StateError
from .grid import Grid1D

logger = logging.getLogger(__name__)

CENTER_MARGIN_SIGMAS = 5.0
FOCK_MARGIN = 4.0
MAX_FOCK = 200


class CoherentLabel(BaseModel):
    """Phase-space label of a coherent state"""

    model_config = ConfigDict(frozen=True)

    x0: float = 0.0
    p0: float = 0.0
    sigma: float = Field(1.0, gt=0)

    @classmethod
    def from_z(cls, z: complex, sigma: float = 1.0) -> "CoherentLabel":
        return cls(x0=float(np.sqrt(2.0) * z.real), p0=float(np.sqrt(2.0) * z.imag), sigma=sigma)

    @property
    def z(self) -> complex:
        return complex(self.x0, self.p0) / np.sqrt(2.0)


class WaveFunction(BaseModel):
    """Complex amplitudes psi(x_i) of a pure state"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid1D
    amp: np.ndarray

    @field_validator("amp", mode="before")
    @classmethod
    def _as_complex(cls, v):
        return np.asarray(v, dtype=complex)

    @model_validator(mode="after")
    def _check_shape(self):
        if self.amp.shape != (self.grid.n,):
            raise GridError(f"wave function has shape {self.amp.shape}, grid has {self.grid.n} samples")
        return self

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2) * self.grid.dx)

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other> by the discrete inner product"""
        return complex(np.vdot(self.amp, other.amp) * self.grid.dx)


class DensityMatrix(BaseModel):
    """Samples rho(x_i, x_j) of a density operator; tr = sum rho(x_i, x_i) dx"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid1D
    rho: np.ndarray

    @field_validator("rho", mode="before")
    @classmethod
    def _as_complex(cls, v):
        return np.asarray(v, dtype=complex)

    @model_validator(mode="after")
    def _check_shape(self):
        n = self.grid.n
        if self.rho.shape != (n, n):
            raise GridError(f"density matrix has shape {self.rho.shape}, grid expects {(n, n)}")
        return self

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)) * self.grid.dx)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def operator(self) -> np.ndarray:
        """Matrix of the operator in the discrete orthonormal basis (rho * dx)"""
        return self.rho * self.grid.dx

    def purity(self) -> float:
        op = self.operator()
        return float(np.real(np.sum(op * op.T)))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


def _require_inside(x0: float, width: float, grid: Grid1D, what: str) -> None:
    margin = CENTER_MARGIN_SIGMAS * width
    if x0 - margin < grid.x_min or x0 + margin > grid.last:
        raise StateError(
            f"{what} centred at x={x0} needs {margin:g} units of margin inside [{grid.x_min}, {grid.last}]"
        )


def coherent_amplitudes(x0, p0, grid: Grid1D, sigma: float = 1.0) -> np.ndarray:
    """
    Coherent vectors for arrays of labels, shape (n_grid, n_labels).
    No margin checks; callers sampling many labels use this directly.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    x = grid.points[:, None]
    shift = x - x0[None, :]
    prefactor = (np.pi * sigma**2) ** -0.25
    return prefactor * np.exp(-0.5 * shift**2 / sigma**2 + 1j * p0[None, :] * shift)


def coherent_state(label: CoherentLabel, grid: Grid1D) -> WaveFunction:
    """Sampled coherent state |z>; the center must keep 5 sigma away from both edges"""
    _require_inside(label.x0, label.sigma, grid, "coherent state")
    amp = coherent_amplitudes(label.x0, label.p0, grid, label.sigma)[:, 0]
    return WaveFunction(grid=grid, amp=amp)


def fock_state(n: int, grid: Grid1D) -> WaveFunction:
    """
    Hermite function h_n by the recurrence on normalized functions
    h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}.
    """
    if n < 0 or n > MAX_FOCK:
        raise StateError(f"Fock index must lie in [0, {MAX_FOCK}], got {n}")
    turning = np.sqrt(2 * n + 1)
    if turning + FOCK_MARGIN > min(-grid.x_min, grid.last):
        raise StateError(
            f"Fock state {n} needs half-width >= {turning + FOCK_MARGIN:.2f}, grid reaches [{grid.x_min}, {grid.last}]"
        )
    x = grid.points
    h_prev = np.zeros_like(x)
    h = np.pi**-0.25 * np.exp(-0.5 * x**2)
    for k in range(n):
        h_prev, h = h, np.sqrt(2.0 / (k + 1)) * x * h - np.sqrt(k / (k + 1)) * h_prev
    return WaveFunction(grid=grid, amp=h)


def cat_state(a: CoherentLabel, b: CoherentLabel, rel_phase: float, grid: Grid1D) -> WaveFunction:
    """N (|a> + e^{i phi} |b>), normalized including the overlap of the two branches"""
    psi_a = coherent_state(a, grid)
    psi_b = coherent_state(b, grid)
    phase = np.exp(1j * rel_phase)
    overlap = psi_a.inner(psi_b)
    norm_sq = psi_a.norm() + psi_b.norm() + 2.0 * np.real(phase * overlap)
    if norm_sq <= 1e-12:
        raise StateError("cat branches cancel: the superposition has zero norm")
    amp = (psi_a.amp + phase * psi_b.amp) / np.sqrt(norm_sq)
    logger.debug(f"cat_state: overlap={abs(overlap):.3e} norm_sq={norm_sq:.6f}")
    return WaveFunction(grid=grid, amp=amp)


def density_from_pure(psi: WaveFunction) -> DensityMatrix:
    """rho(x, y) = psi(x) conj(psi(y))"""
    return DensityMatrix(grid=psi.grid, rho=np.outer(psi.amp, psi.amp.conj()))


def mix(states: list[DensityMatrix], weights: Optional[list[float]] = None) -> DensityMatrix:
    """Convex combination of density matrices on a common grid"""
    if not states:
        raise StateError("nothing to mix")
    grid = states[0].grid
    if any(not s.grid.matches(grid) for s in states):
        raise GridError("cannot mix states on different grids")
    if weights is None:
        weights = [1.0 / len(states)] * len(states)
    rho = sum(w * s.rho for w, s in zip(weights, states))
    return DensityMatrix(grid=grid, rho=rho)


StateKind = Literal["coherent", "cat_position", "cat_momentum", "fock"]


class StateSpec(BaseModel):
    """Recipe for one of the standard initial states; cats put their branches at +-separation"""

    kind: StateKind = "coherent"
    x0: float = 0.0
    p0: float = 0.0
    separation: float = Field(3.0, gt=0)
    rel_phase: float = 0.0
    sigma: float = Field(1.0, gt=0)
    index: int = Field(0, ge=0)


def build_state(spec: StateSpec, grid: Grid1D) -> WaveFunction:
    if spec.kind == "coherent":
        return coherent_state(CoherentLabel(x0=spec.x0, p0=spec.p0, sigma=spec.sigma), grid)
    if spec.kind == "fock":
        return fock_state(spec.index, grid)
    if spec.kind == "cat_position":
        offset = (spec.separation, 0.0)
    else:
        offset = (0.0, spec.separation)
    a = CoherentLabel(x0=spec.x0 + offset[0], p0=spec.p0 + offset[1], sigma=spec.sigma)
    b = CoherentLabel(x0=spec.x0 - offset[0], p0=spec.p0 - offset[1], sigma=spec.sigma)
    return cat_state(a, b, spec.rel_phase, grid)
