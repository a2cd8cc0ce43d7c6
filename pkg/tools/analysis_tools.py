"""
PhaseMCP Analysis Tools

Diagnostics, comparisons and saving of stored states.
"""

import logging
from pathlib import Path
from typing import Any, Dict

from phasespace.analysis import compare_fields, density_purity, phase_space_stats
from phasespace.fieldio import write_density, write_field
from phasespace.render import render_heatmap
from phasespace.settings import get_settings
from phasespace.states import DensityMatrix
from tools.common import handle_tool_error, log_tool_call, log_tool_response, ok

# These will be set when the tools are registered
mcp = None
session_manager = None

logger = logging.getLogger(__name__)


async def analyze_state(source: str) -> Dict[str, Any]:
    """Moments, negativity volume and purity of a stored state.

    Args:
        source: Name of a stored state or Wigner function
    """
    log_tool_call("analyze_state", source=source)
    try:
        metrics = phase_space_stats(session_manager.get_wigner(source)).model_dump()
        stored = session_manager.get(source)
        if isinstance(stored, DensityMatrix):
            metrics["density_purity"] = density_purity(stored)
        result = ok(f"Metrics of '{source}'", metrics=metrics)
        log_tool_response("analyze_state", result)
        return result
    except Exception as e:
        log_tool_response("analyze_state", None, error=e)
        return handle_tool_error(e, f"analyze '{source}'")


async def compare_states(a: str, b: str) -> Dict[str, Any]:
    """L2 and L-infinity distance between the Wigner functions of two stored states.

    Args:
        a: Name of the first state
        b: Name of the second state
    """
    log_tool_call("compare_states", a=a, b=b)
    try:
        norms = compare_fields(session_manager.get_wigner(a), session_manager.get_wigner(b))
        result = ok(f"Distance between '{a}' and '{b}'", **norms)
        log_tool_response("compare_states", result)
        return result
    except Exception as e:
        log_tool_response("compare_states", None, error=e)
        return handle_tool_error(e, f"compare '{a}' and '{b}'")


async def save_state(source: str, filename: str, png: bool = False) -> Dict[str, Any]:
    """Write a stored state to CSV (and a PNG heatmap for real fields) in the output directory.

    Args:
        source: Name of a stored state
        filename: CSV file name, relative to the configured output directory
        png: Also render a heatmap next to the CSV
    """
    log_tool_call("save_state", source=source, filename=filename, png=png)
    try:
        path = Path(get_settings().output.directory) / filename
        stored = session_manager.get(source)
        written = []
        if isinstance(stored, DensityMatrix):
            written.append(str(write_density(stored, path)))
            if png:
                written.append(str(render_heatmap(session_manager.get_wigner(source), path.with_suffix(".png"))))
        else:
            written.append(str(write_field(stored, path)))
            if png and not stored.is_complex:
                written.append(str(render_heatmap(stored, path.with_suffix(".png"))))
        result = ok(f"Saved '{source}'", files=written)
        log_tool_response("save_state", result)
        return result
    except Exception as e:
        log_tool_response("save_state", None, error=e)
        return handle_tool_error(e, f"save '{source}'")


def register_analysis_tools(mcp_instance, session_manager_instance):
    """Register the analysis tools"""
    global mcp, session_manager
    mcp = mcp_instance
    session_manager = session_manager_instance

    logger.info("Registering analysis tools...")
    mcp.tool(name="analyze_state", description="Moments, negativity volume and purity of a stored state.")(
        analyze_state
    )
    mcp.tool(name="compare_states", description="Distance between the Wigner functions of two states.")(
        compare_states
    )
    mcp.tool(name="save_state", description="Write a stored state to CSV and optionally PNG.")(save_state)
    logger.info("Analysis tools registered successfully")
