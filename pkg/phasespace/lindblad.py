"""
Time evolution under position decoherence, phase-space decoherence and the
harmonic oscillator.

Analytic propagators act on the Wigner function (or pointwise on the density
matrix for position decoherence). Hamiltonian flow is applied as an exact
phase-space map; the position-decoherence case with a Hamiltonian is
Strang-split. evolve_master_oracle integrates the master equation directly
with RK4 in the position basis and serves as an independent reference.

Sign convention: for omega = m = 1 the Hamiltonian flow x' = p, p' = -x turns
phase-space points clockwise in the (x, p) plane, and W is advected along it.
"""

import logging
import math
from typing import Callable, List, Literal, Optional, Sequence

import numpy as np
import scipy.fft as sfft
from pydantic import BaseModel, ConfigDict, Field
from scipy.ndimage import map_coordinates

from .errors import BoundaryError, EvolutionError, ParameterError
from .grid import Grid1D, angular_frequencies, gaussian_convolve, support_margin
from .settings import fft_workers, get_settings
from .states import DensityMatrix
from .transforms import WignerFunction

logger = logging.getLogger(__name__)

MARGIN_STDDEVS = 4.0
MAX_SHEAR_ANGLE = np.pi / 8
STEP_CHECK_TOL = 1e-4
TRACE_DRIFT_RETRY = 1e-8
TRACE_DRIFT_ABORT = 1e-6
MAX_HALVINGS = 4

Mode = Literal["position_decoherence", "phase_space_decoherence"]


class EvolutionSpec(BaseModel):
    """Parameters of one evolution run; omega = 0 switches the Hamiltonian off"""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(0.0, ge=0)
    omega: float = Field(0.0, ge=0)
    mass: float = Field(1.0, gt=0)
    mode: Mode = "phase_space_decoherence"
    t: float = Field(0.0, ge=0)
    n_steps: int = Field(1, ge=1)


def _check_rate(gamma: float, t: float) -> None:
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    if t < 0:
        raise ParameterError(f"t must be non-negative, got {t}")


def _require_margin(w: WignerFunction, variance: float, axes: str, what: str) -> None:
    if variance <= 0:
        return
    needed = MARGIN_STDDEVS * math.sqrt(variance)
    mx, mp = support_margin(w)
    margins = {"x": mx, "p": mp}
    for axis in axes:
        if margins[axis] < needed:
            raise BoundaryError(
                f"{what}: support leaves {margins[axis]:.2f} units on the {axis} axis, diffusion needs {needed:.2f}"
            )


def evolve_position_lindblad(rho0: DensityMatrix, gamma: float, t: float) -> DensityMatrix:
    """Closed form of position decoherence: rho_t(x, y) = e^{-gamma (x-y)^2 t/2} rho_0(x, y)"""
    _check_rate(gamma, t)
    x = rho0.grid.points
    damping = np.exp(-0.5 * gamma * t * (x[:, None] - x[None, :]) ** 2)
    return DensityMatrix(grid=rho0.grid, rho=rho0.rho * damping)


def evolve_phase_space_lindblad(w0: WignerFunction, gamma: float, t: float) -> WignerFunction:
    """Heat-kernel solution of phase-space decoherence: per-axis Gaussian smoothing of variance gamma*t"""
    _check_rate(gamma, t)
    _require_margin(w0, gamma * t, "xp", "evolve_phase_space_lindblad")
    smoothed = gaussian_convolve(w0, gamma * t, gamma * t)
    return WignerFunction(grid=w0.grid, values=smoothed.values)


def harmonic_flow(omega: float, mass: float, t: float) -> np.ndarray:
    """Classical flow matrix of H = p^2/(2m) + m omega^2 x^2/2 acting on (x, p)"""
    c, s = math.cos(omega * t), math.sin(omega * t)
    mw = mass * omega
    return np.array([[c, s / mw], [-mw * s, c]])


def _require_orbit_inside(w: WignerFunction, omega: float, mass: float) -> None:
    tol = get_settings().numerics.support_tol
    mag = np.abs(w.values)
    ix, ip = np.nonzero(mag > tol * mag.max())
    if ix.size == 0:
        return
    x = w.grid.gx.points[ix]
    p = w.grid.gp.points[ip]
    mw = mass * omega
    x_amp = np.sqrt(x**2 + (p / mw) ** 2).max()
    p_amp = np.sqrt((mw * x) ** 2 + p**2).max()
    x_room = min(-w.grid.gx.x_min, w.grid.gx.last)
    p_room = min(-w.grid.gp.x_min, w.grid.gp.last)
    if x_amp > x_room or p_amp > p_room:
        raise BoundaryError(
            f"harmonic orbits of the support reach |x|={x_amp:.2f}, |p|={p_amp:.2f}; grid allows {x_room:.2f}, {p_room:.2f}"
        )


def _shift_along(values: np.ndarray, g: Grid1D, shifts: np.ndarray, axis: int) -> np.ndarray:
    # f(u + s) for a shift s that varies along the other axis
    workers = fft_workers()
    q = angular_frequencies(g)
    phase = np.exp(1j * q[:, None] * shifts[None, :]) if axis == 0 else np.exp(1j * shifts[:, None] * q[None, :])
    out = sfft.ifft(sfft.fft(values, axis=axis, workers=workers) * phase, axis=axis, workers=workers)
    return out.real


def _rotate_by_shears(values: np.ndarray, w: WignerFunction, omega: float, mass: float, t: float) -> np.ndarray:
    gx, gp = w.grid.gx, w.grid.gp
    x, p = gx.points, gp.points
    theta = omega * t
    pieces = max(1, math.ceil(abs(theta) / MAX_SHEAR_ANGLE))
    theta_piece = theta / pieces
    if theta_piece == 0:
        return values
    mw = mass * omega
    # pull-back map flow(-t) = X(alpha) P(beta) X(alpha)
    alpha = -math.tan(0.5 * theta_piece) / mw
    beta = mw * math.sin(theta_piece)
    for _ in range(pieces):
        values = _shift_along(values, gx, alpha * p, axis=0)
        values = _shift_along(values, gp, beta * x, axis=1)
        values = _shift_along(values, gx, alpha * p, axis=0)
    return values


def _rotate_by_spline(values: np.ndarray, w: WignerFunction, omega: float, mass: float, t: float) -> np.ndarray:
    gx, gp = w.grid.gx, w.grid.gp
    xx, pp = w.grid.mesh()
    back = harmonic_flow(omega, mass, -t)
    xs = back[0, 0] * xx + back[0, 1] * pp
    ps = back[1, 0] * xx + back[1, 1] * pp
    coords = [(xs - gx.x_min) / gx.dx, (ps - gp.x_min) / gp.dx]
    return map_coordinates(values, coords, order=3, mode="grid-wrap")


def evolve_harmonic_rotation(
    w0: WignerFunction,
    omega: float,
    mass: float,
    t: float,
    method: Literal["shear", "spline"] = "shear",
) -> WignerFunction:
    """
    W_t(z) = W_0(flow(-t) z). The default applies the flow as three spectral
    shears per step of at most pi/8; "spline" resamples with bicubic
    interpolation on the periodic grid.
    """
    if omega <= 0 or mass <= 0:
        raise ParameterError(f"omega and mass must be positive, got omega={omega}, mass={mass}")
    _require_orbit_inside(w0, omega, mass)
    values = np.asarray(w0.values, dtype=float)
    if method == "shear":
        values = _rotate_by_shears(values, w0, omega, mass, t)
    elif method == "spline":
        values = _rotate_by_spline(values, w0, omega, mass, t)
    else:
        raise ParameterError(f"unknown rotation method {method!r}")
    return WignerFunction(grid=w0.grid, values=values)


def _dissipate(w: WignerFunction, mode: Mode, gamma: float, dt: float) -> WignerFunction:
    var = gamma * dt
    if mode == "position_decoherence":
        # damping of rho across the diagonal is smoothing of W along p
        smoothed = gaussian_convolve(w, 0.0, var)
    else:
        smoothed = gaussian_convolve(w, var, var)
    return WignerFunction(grid=w.grid, values=smoothed.values)


def _strang(w0: WignerFunction, spec: EvolutionSpec, n_steps: int) -> WignerFunction:
    dt = spec.t / n_steps
    w = evolve_harmonic_rotation(w0, spec.omega, spec.mass, 0.5 * dt)
    for step in range(n_steps):
        w = _dissipate(w, spec.mode, spec.gamma, dt)
        half_or_full = 0.5 * dt if step == n_steps - 1 else dt
        w = evolve_harmonic_rotation(w, spec.omega, spec.mass, half_or_full)
    return w


def evolve_composed(w0: WignerFunction, spec: EvolutionSpec, check_steps: bool = False) -> WignerFunction:
    """
    Decoherence plus optional harmonic Hamiltonian.

    Phase-space decoherence with m*omega = 1 is exact: the isotropic heat
    kernel commutes with rotations, so rotate(t) then diffuse(gamma t).
    Every other case with omega > 0 is Strang-split into n_steps steps of
    rotate(dt/2), dissipate(dt), rotate(dt/2).
    """
    _check_rate(spec.gamma, spec.t)
    if spec.t == 0:
        return WignerFunction(grid=w0.grid, values=np.array(w0.values, copy=True))
    if spec.omega == 0:
        if spec.mode == "phase_space_decoherence":
            return evolve_phase_space_lindblad(w0, spec.gamma, spec.t)
        _require_margin(w0, spec.gamma * spec.t, "p", "evolve_composed")
        return _dissipate(w0, spec.mode, spec.gamma, spec.t)

    _require_margin(w0, spec.gamma * spec.t, "xp", "evolve_composed")
    if spec.mode == "phase_space_decoherence" and math.isclose(spec.mass * spec.omega, 1.0):
        rotated = evolve_harmonic_rotation(w0, spec.omega, spec.mass, spec.t)
        return _dissipate(rotated, spec.mode, spec.gamma, spec.t)

    logger.info(f"Strang splitting: mode={spec.mode} n_steps={spec.n_steps} dt={spec.t / spec.n_steps:.4g}")
    result = _strang(w0, spec, spec.n_steps)
    if check_steps:
        refined = _strang(w0, spec, 2 * spec.n_steps)
        change = float(np.max(np.abs(refined.values - result.values)))
        if change > STEP_CHECK_TOL:
            raise EvolutionError(
                f"n_steps={spec.n_steps} is too coarse: halving the step changes W by {change:.2e} (> {STEP_CHECK_TOL:.0e})"
            )
        logger.info(f"Step check passed: halving dt changes W by {change:.2e}")
    return result


def evolve_trajectory(
    w0: WignerFunction, spec: EvolutionSpec, times: Sequence[float], check_steps: bool = False
) -> List[WignerFunction]:
    """Snapshots at sorted times; splitting steps are shared out in proportion to each interval"""
    times = list(times)
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise ParameterError(f"snapshot times must be non-negative and ascending, got {times}")
    horizon = times[-1] if times else 0.0
    snapshots = []
    current, now = w0, 0.0
    for target in times:
        span = target - now
        if span > 0:
            steps = max(1, round(spec.n_steps * span / horizon))
            current = evolve_composed(current, spec.model_copy(update={"t": span, "n_steps": steps}), check_steps)
            now = target
        snapshots.append(current)
    return snapshots


class MasterEquation:
    """
    Right-hand side of the Lindblad equation on a position grid.

    x is diagonal; p and p^2 act spectrally along an axis. Right
    multiplication uses rho A = (A rho^dagger)^dagger for Hermitian A.
    """

    def __init__(self, grid: Grid1D, spec: EvolutionSpec):
        self.grid = grid
        self.spec = spec
        x = grid.points
        self.sep2 = (x[:, None] - x[None, :]) ** 2
        k = angular_frequencies(grid)
        self.k_first = k.copy()
        if grid.n % 2 == 0:
            self.k_first[grid.n // 2] = 0.0
        self.kinetic = k**2 / (2.0 * spec.mass)
        self.potential = 0.5 * spec.mass * spec.omega**2 * x**2

    def _left(self, multiplier: np.ndarray, rho: np.ndarray) -> np.ndarray:
        workers = fft_workers()
        return sfft.ifft(multiplier[:, None] * sfft.fft(rho, axis=0, workers=workers), axis=0, workers=workers)

    def _right(self, multiplier: np.ndarray, rho: np.ndarray) -> np.ndarray:
        return self._left(multiplier, rho.conj().T).conj().T

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        spec = self.spec
        out = np.zeros_like(rho)
        if spec.omega > 0:
            h_rho = self._left(self.kinetic, rho) + self.potential[:, None] * rho
            rho_h = self._right(self.kinetic, rho) + rho * self.potential[None, :]
            out += -1j * (h_rho - rho_h)
        if spec.gamma > 0:
            out += -0.5 * spec.gamma * self.sep2 * rho
            if spec.mode == "phase_space_decoherence":
                p_rho = self._left(self.k_first, rho)
                p_rho_p = self._right(self.k_first, p_rho)
                p2_rho = self._left(self.k_first**2, rho)
                rho_p2 = self._right(self.k_first**2, rho)
                out += -0.5 * spec.gamma * (p2_rho - 2.0 * p_rho_p + rho_p2)
        return out

    def default_dt(self) -> float:
        spec = self.spec
        g = self.grid
        x_max = max(abs(g.x_min), abs(g.last))
        k_max = np.pi / g.dx
        dt = 1e-3
        if spec.gamma > 0:
            dt = min(dt, 0.1 / (spec.gamma * x_max**2))
            if spec.mode == "phase_space_decoherence":
                dt = min(dt, 0.1 / (spec.gamma * k_max**2))
        if spec.omega > 0:
            dt = min(dt, 1.0 / (k_max**2 / (2.0 * spec.mass) + self.potential.max()))
        return dt


def rk4_integrate(rhs: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta with the step adjusted to land on t"""
    steps = max(1, math.ceil(t / dt - 1e-12))
    h = t / steps
    y = y0.copy()
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def evolve_master_oracle(rho0: DensityMatrix, spec: EvolutionSpec, dt: Optional[float] = None) -> DensityMatrix:
    """
    Direct RK4 integration of the master equation in the position basis.
    The step is halved until the trace drift stays below 1e-8; a final drift
    above 1e-6 aborts.
    """
    _check_rate(spec.gamma, spec.t)
    equation = MasterEquation(rho0.grid, spec)
    if dt is None:
        dt = equation.default_dt()
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    trace0 = rho0.trace()

    drift = np.inf
    for attempt in range(MAX_HALVINGS + 1):
        logger.info(f"RK4 oracle: mode={spec.mode} gamma={spec.gamma} omega={spec.omega} t={spec.t} dt={dt:.3g}")
        rho = rk4_integrate(equation.rhs, rho0.rho, spec.t, dt)
        if not np.all(np.isfinite(rho)):
            drift = np.inf
        else:
            drift = abs(float(np.real(np.trace(rho))) * rho0.grid.dx - trace0)
        if drift < TRACE_DRIFT_RETRY:
            return DensityMatrix(grid=rho0.grid, rho=0.5 * (rho + rho.conj().T))
        logger.warning(f"RK4 oracle: trace drift {drift:.2e} at dt={dt:.3g}, halving the step")
        dt *= 0.5

    if drift > TRACE_DRIFT_ABORT:
        raise EvolutionError(
            f"RK4 oracle unstable: trace drift {drift:.2e} after {MAX_HALVINGS} halvings (final dt={2 * dt:.3g})"
        )
    return DensityMatrix(grid=rho0.grid, rho=0.5 * (rho + rho.conj().T))
