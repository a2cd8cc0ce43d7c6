"""
PhaseMCP Evolution Tools

Lindblad evolution of stored states, analytic or by the RK4 oracle.
"""

import logging
import time
from typing import Any, Dict, Optional

from phasespace.analysis import density_moments, phase_space_stats
from phasespace.lindblad import EvolutionSpec, evolve_composed, evolve_master_oracle
from tools.common import handle_tool_error, log_tool_call, log_tool_response, ok

# These will be set when the tools are registered
mcp = None
session_manager = None

logger = logging.getLogger(__name__)

MODES = {
    "position": "position_decoherence",
    "phasespace": "phase_space_decoherence",
    "position_decoherence": "position_decoherence",
    "phase_space_decoherence": "phase_space_decoherence",
}


async def evolve_state(
    source: str,
    target: str,
    mode: str,
    gamma: float,
    t: float,
    omega: float = 0.0,
    mass: float = 1.0,
    n_steps: int = 64,
    check_steps: bool = True,
    oracle: bool = False,
    dt: Optional[float] = None,
) -> Dict[str, Any]:
    """Evolve a stored state under position or phase-space decoherence, optionally with a harmonic oscillator.

    Args:
        source: Name of a stored state or Wigner function
        target: Name for the evolved state
        mode: "position" or "phasespace"
        gamma: Decoherence rate
        t: Evolution time
        omega: Oscillator frequency (0 switches the Hamiltonian off)
        mass: Oscillator mass
        n_steps: Splitting steps when position decoherence is combined with the oscillator
        check_steps: Fail when halving the splitting step changes the result by more than 1e-4
        oracle: Integrate the master equation with RK4 instead (slow, density matrix result)
        dt: RK4 step (default chosen from the grid)

    Returns:
        Dictionary with moment drift and runtime
    """
    log_tool_call("evolve_state", source=source, target=target, mode=mode, gamma=gamma, t=t, omega=omega, oracle=oracle)
    try:
        if mode not in MODES:
            raise ValueError(f"mode must be one of {sorted(MODES)}, got '{mode}'")
        spec = EvolutionSpec(gamma=gamma, omega=omega, mass=mass, mode=MODES[mode], t=t, n_steps=n_steps)
        started = time.perf_counter()
        if oracle:
            rho0 = session_manager.get_density(source)
            rho = evolve_master_oracle(rho0, spec, dt)
            session_manager.put(target, rho)
            before, after = density_moments(rho0), density_moments(rho)
        else:
            w0 = session_manager.get_wigner(source)
            w = evolve_composed(w0, spec, check_steps=check_steps)
            session_manager.put(target, w)
            before, after = phase_space_stats(w0), phase_space_stats(w)
        result = ok(
            f"'{source}' evolved to t={t}, stored as '{target}'",
            spec=spec.model_dump(),
            trace_drift=after.trace - before.trace,
            mean_x_drift=after.mean_x - before.mean_x,
            mean_p_drift=after.mean_p - before.mean_p,
            var_x_change=after.var_x - before.var_x,
            var_p_change=after.var_p - before.var_p,
            runtime_seconds=round(time.perf_counter() - started, 3),
        )
        log_tool_response("evolve_state", result)
        return result
    except Exception as e:
        log_tool_response("evolve_state", None, error=e)
        return handle_tool_error(e, f"evolve '{source}'")


def register_evolution_tools(mcp_instance, session_manager_instance):
    """Register the evolution tools"""
    global mcp, session_manager
    mcp = mcp_instance
    session_manager = session_manager_instance

    logger.info("Registering evolution tools...")
    mcp.tool(name="evolve_state", description="Lindblad evolution under position or phase-space decoherence.")(
        evolve_state
    )
    logger.info("Evolution tools registered successfully")
