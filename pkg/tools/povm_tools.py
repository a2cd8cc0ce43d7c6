"""
PhaseMCP POVM Tools

Detection probabilities, the unrecorded-measurement channel, Wigner smoothing
and sampled coherent-state measurements.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from phasespace.povm import (
    PhaseSpaceRegion,
    povm_channel,
    povm_probability,
    povm_smooth_wigner,
    sample_povm_outcome,
    sample_povm_outcomes,
)
from tools.common import handle_tool_error, log_tool_call, log_tool_response, ok
from tools.transform_tools import field_summary

# These will be set when the tools are registered
mcp = None
session_manager = None

logger = logging.getLogger(__name__)

MAX_RETURNED_OUTCOMES = 1000


async def povm_probability_tool(
    source: str,
    x_lo: Optional[float] = None,
    x_hi: Optional[float] = None,
    p_lo: Optional[float] = None,
    p_hi: Optional[float] = None,
    sigma: float = 1.0,
) -> Dict[str, Any]:
    """Probability that a coherent-state measurement lands in a phase-space rectangle.

    Args:
        source: Name of a stored state
        x_lo, x_hi, p_lo, p_hi: Rectangle bounds; omitted bounds are unbounded
        sigma: Width of the coherent states
    """
    log_tool_call("povm_probability", source=source, x_lo=x_lo, x_hi=x_hi, p_lo=p_lo, p_hi=p_hi)
    try:
        bounds = {k: v for k, v in {"x_lo": x_lo, "x_hi": x_hi, "p_lo": p_lo, "p_hi": p_hi}.items() if v is not None}
        region = PhaseSpaceRegion(**bounds)
        prob = povm_probability(session_manager.get_density(source), region, sigma)
        result = ok(f"P(z in region) for '{source}'", probability=prob, region=bounds)
        log_tool_response("povm_probability", result)
        return result
    except Exception as e:
        log_tool_response("povm_probability", None, error=e)
        return handle_tool_error(e, f"compute a detection probability for '{source}'")


async def apply_povm_channel(source: str, target: str, m: int = 1, sigma: float = 1.0) -> Dict[str, Any]:
    """Apply m unrecorded coherent-state measurements to a stored state.

    Args:
        source: Name of a stored state
        target: Name for the resulting density matrix
        m: Number of measurements (positive integer)
        sigma: Width of the coherent states
    """
    log_tool_call("apply_povm_channel", source=source, target=target, m=m, sigma=sigma)
    try:
        rho = povm_channel(session_manager.get_density(source), m, sigma)
        session_manager.put(target, rho)
        result = ok(f"Channel applied {m} times to '{source}', stored as '{target}'", trace=rho.trace(), purity=rho.purity())
        log_tool_response("apply_povm_channel", result)
        return result
    except Exception as e:
        log_tool_response("apply_povm_channel", None, error=e)
        return handle_tool_error(e, f"apply the POVM channel to '{source}'")


async def smooth_wigner(source: str, target: str, m: float = 1.0, sigma: float = 1.0) -> Dict[str, Any]:
    """Wigner function after m measurements (m may be fractional; m = 1/2 gives the Husimi function).

    Args:
        source: Name of a stored state or Wigner function
        target: Name for the smoothed Wigner function
        m: Non-negative measurement count
        sigma: Width of the coherent states
    """
    log_tool_call("smooth_wigner", source=source, target=target, m=m, sigma=sigma)
    try:
        w = povm_smooth_wigner(session_manager.get_wigner(source), m, sigma)
        session_manager.put(target, w)
        result = ok(f"'{source}' smoothed with m={m}, stored as '{target}'", field=field_summary(w))
        log_tool_response("smooth_wigner", result)
        return result
    except Exception as e:
        log_tool_response("smooth_wigner", None, error=e)
        return handle_tool_error(e, f"smooth the Wigner function of '{source}'")


async def sample_povm(
    source: str, n_samples: int = 1, seed: int = 0, sigma: float = 1.0, target: Optional[str] = None
) -> Dict[str, Any]:
    """Sample coherent-state measurement outcomes from a stored state.

    Args:
        source: Name of a stored state
        n_samples: Number of outcomes to draw
        seed: Random seed; the same seed gives the same outcomes
        sigma: Width of the coherent states
        target: With n_samples=1, store the post-measurement coherent state under this name
    """
    log_tool_call("sample_povm", source=source, n_samples=n_samples, seed=seed, target=target)
    try:
        rho = session_manager.get_density(source)
        if target and n_samples == 1:
            record = sample_povm_outcome(rho, seed, sigma)
            session_manager.put(target, record.post_state)
            outcomes = np.array([[record.outcome.x0, record.outcome.p0]])
        else:
            outcomes = sample_povm_outcomes(rho, n_samples, seed, sigma)
        result = ok(
            f"{len(outcomes)} outcomes sampled from '{source}'",
            mean=outcomes.mean(axis=0).tolist(),
            outcomes=outcomes[:MAX_RETURNED_OUTCOMES].tolist(),
            truncated=len(outcomes) > MAX_RETURNED_OUTCOMES,
        )
        log_tool_response("sample_povm", result)
        return result
    except Exception as e:
        log_tool_response("sample_povm", None, error=e)
        return handle_tool_error(e, f"sample measurements of '{source}'")


def register_povm_tools(mcp_instance, session_manager_instance):
    """Register the coherent-state POVM tools"""
    global mcp, session_manager
    mcp = mcp_instance
    session_manager = session_manager_instance

    logger.info("Registering POVM tools...")
    mcp.tool(name="povm_probability", description="Probability of detecting a phase-space event.")(
        povm_probability_tool
    )
    mcp.tool(name="apply_povm_channel", description="Apply m unrecorded coherent-state measurements.")(
        apply_povm_channel
    )
    mcp.tool(name="smooth_wigner", description="Wigner function after m coherent-state measurements.")(
        smooth_wigner
    )
    mcp.tool(name="sample_povm", description="Sample coherent-state measurement outcomes.")(sample_povm)
    logger.info("POVM tools registered successfully")
