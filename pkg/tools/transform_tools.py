"""
PhaseMCP Transform Tools

Wigner, Husimi and characteristic functions of stored states.
"""

import logging
from typing import Any, Dict

import numpy as np

from phasespace.transforms import characteristic_from_wigner, husimi_from_density, marginals
from tools.common import handle_tool_error, log_tool_call, log_tool_response, ok

# These will be set when the tools are registered
mcp = None
session_manager = None

logger = logging.getLogger(__name__)


def field_summary(field) -> Dict[str, Any]:
    values = np.asarray(field.values)
    summary = {"shape": list(values.shape), "integral": complex(field.integral()).real}
    if np.iscomplexobj(values):
        summary["max_abs"] = float(np.abs(values).max())
    else:
        summary["min"] = float(values.min())
        summary["max"] = float(values.max())
    return summary


async def to_wigner(source: str, target: str) -> Dict[str, Any]:
    """Compute the Wigner function of a stored state.

    Args:
        source: Name of a stored density matrix
        target: Name to store the Wigner function under
    """
    log_tool_call("to_wigner", source=source, target=target)
    try:
        w = session_manager.get_wigner(source)
        session_manager.put(target, w)
        result = ok(f"Wigner function of '{source}' stored as '{target}'", field=field_summary(w))
        log_tool_response("to_wigner", result)
        return result
    except Exception as e:
        log_tool_response("to_wigner", None, error=e)
        return handle_tool_error(e, f"compute the Wigner function of '{source}'")


async def to_husimi(source: str, target: str, sigma: float = 1.0) -> Dict[str, Any]:
    """Compute the Husimi Q function <z|rho|z>/(2 pi) of a stored state.

    Args:
        source: Name of a stored state
        target: Name to store the Husimi function under
        sigma: Width of the coherent states
    """
    log_tool_call("to_husimi", source=source, target=target, sigma=sigma)
    try:
        q = husimi_from_density(session_manager.get_density(source), sigma)
        session_manager.put(target, q)
        result = ok(f"Husimi function of '{source}' stored as '{target}'", field=field_summary(q))
        log_tool_response("to_husimi", result)
        return result
    except Exception as e:
        log_tool_response("to_husimi", None, error=e)
        return handle_tool_error(e, f"compute the Husimi function of '{source}'")


async def to_characteristic(source: str, target: str) -> Dict[str, Any]:
    """Compute the characteristic function (Fourier transform of W) of a stored state.

    Args:
        source: Name of a stored state or Wigner function
        target: Name to store the characteristic function under
    """
    log_tool_call("to_characteristic", source=source, target=target)
    try:
        chi = characteristic_from_wigner(session_manager.get_wigner(source))
        session_manager.put(target, chi)
        result = ok(f"Characteristic function of '{source}' stored as '{target}'", field=field_summary(chi))
        log_tool_response("to_characteristic", result)
        return result
    except Exception as e:
        log_tool_response("to_characteristic", None, error=e)
        return handle_tool_error(e, f"compute the characteristic function of '{source}'")


async def wigner_marginals(source: str) -> Dict[str, Any]:
    """Position and momentum densities of a stored state, integrated from its Wigner function.

    Args:
        source: Name of a stored state or Wigner function

    Returns:
        Sample points and values of P(x) and P(p)
    """
    log_tool_call("wigner_marginals", source=source)
    try:
        w = session_manager.get_wigner(source)
        px, pp = marginals(w)
        result = ok(
            f"Marginals of '{source}'",
            x=w.grid.gx.points.tolist(),
            position_density=px.tolist(),
            p=w.grid.gp.points.tolist(),
            momentum_density=pp.tolist(),
        )
        log_tool_response("wigner_marginals", result)
        return result
    except Exception as e:
        log_tool_response("wigner_marginals", None, error=e)
        return handle_tool_error(e, f"compute the marginals of '{source}'")


def register_transform_tools(mcp_instance, session_manager_instance):
    """Register the phase-space transform tools"""
    global mcp, session_manager
    mcp = mcp_instance
    session_manager = session_manager_instance

    logger.info("Registering transform tools...")
    mcp.tool(name="to_wigner", description="Compute the Wigner function of a stored state.")(to_wigner)
    mcp.tool(name="to_husimi", description="Compute the Husimi Q function of a stored state.")(to_husimi)
    mcp.tool(name="to_characteristic", description="Compute the characteristic function of a stored state.")(
        to_characteristic
    )
    mcp.tool(name="wigner_marginals", description="Position and momentum densities of a stored state.")(
        wigner_marginals
    )
    logger.info("Transform tools registered successfully")
