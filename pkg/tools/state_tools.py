"""
PhaseMCP State Tools

Create, list and drop the named states a session works on.
"""

import logging
from typing import Any, Dict, Optional

from phasespace.grid import make_grid
from phasespace.settings import get_settings
from phasespace.states import StateSpec, build_state, density_from_pure
from tools.common import handle_tool_error, log_tool_call, log_tool_response, ok

# These will be set when the tools are registered
mcp = None
session_manager = None

logger = logging.getLogger(__name__)


async def create_state(
    name: str,
    kind: str = "coherent",
    x0: float = 0.0,
    p0: float = 0.0,
    separation: float = 3.0,
    rel_phase: float = 0.0,
    sigma: float = 1.0,
    index: int = 0,
    n: Optional[int] = None,
    half_width: Optional[float] = None,
) -> Dict[str, Any]:
    """Create a standard state and store its density matrix under a name.

    Args:
        name: Name to store the state under (replaces an existing state)
        kind: One of coherent, cat_position, cat_momentum, fock
        x0: Position of the coherent state or of the cat's midpoint
        p0: Momentum of the coherent state or of the cat's midpoint
        separation: Cat branches sit at +-separation along x (position cat) or p (momentum cat)
        rel_phase: Relative phase between the two cat branches
        sigma: Coherent-state width
        index: Fock level for kind=fock
        n: Grid points (default from config)
        half_width: Grid half-width (default from config)

    Returns:
        Dictionary with the state's grid and norm
    """
    log_tool_call("create_state", name=name, kind=kind, x0=x0, p0=p0, separation=separation, index=index, n=n)
    try:
        cfg = get_settings().grid
        grid = make_grid(n or cfg.n, half_width or cfg.half_width)
        spec = StateSpec(
            kind=kind, x0=x0, p0=p0, separation=separation, rel_phase=rel_phase, sigma=sigma, index=index,
        )
        psi = build_state(spec, grid)
        session_manager.put(name, density_from_pure(psi))
        result = ok(
            f"Created {kind} state '{name}'",
            name=name,
            state=spec.model_dump(),
            grid=grid.model_dump(),
            norm=psi.norm(),
        )
        log_tool_response("create_state", result)
        return result
    except Exception as e:
        log_tool_response("create_state", None, error=e)
        return handle_tool_error(e, f"create state '{name}'")


async def list_states() -> Dict[str, Any]:
    """List every state stored in this session.

    Returns:
        Dictionary with one entry per state (name, type, shape, grid)
    """
    log_tool_call("list_states")
    try:
        states = session_manager.describe()
        result = ok(f"{len(states)} states stored", states=states)
        log_tool_response("list_states", result)
        return result
    except Exception as e:
        log_tool_response("list_states", None, error=e)
        return handle_tool_error(e, "list states")


async def drop_state(name: str) -> Dict[str, Any]:
    """Remove a stored state.

    Args:
        name: Name of the state to remove
    """
    log_tool_call("drop_state", name=name)
    try:
        if not session_manager.drop(name):
            result = {"success": False, "message": f"No state named '{name}'", "name": name}
        else:
            result = ok(f"Dropped state '{name}'", name=name)
        log_tool_response("drop_state", result)
        return result
    except Exception as e:
        log_tool_response("drop_state", None, error=e)
        return handle_tool_error(e, f"drop state '{name}'")


def register_state_tools(mcp_instance, session_manager_instance):
    """Register the state management tools"""
    global mcp, session_manager
    mcp = mcp_instance
    session_manager = session_manager_instance

    logger.info("Registering state tools...")
    mcp.tool(name="create_state", description="Create a coherent, cat or Fock state on a position grid.")(create_state)
    mcp.tool(name="list_states", description="List the states stored in this session.")(list_states)
    mcp.tool(name="drop_state", description="Remove a stored state.")(drop_state)
    logger.info("State tools registered successfully")
