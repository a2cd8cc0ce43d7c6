"""
PhaseMCP Scenario Tools
"""

import json
import logging
from typing import Any, Dict, Optional

from phasespace.scenarios import list_scenarios as builtin_scenarios
from phasespace.scenarios import load_scenario, run_scenario
from tools.common import handle_tool_error, log_tool_call, log_tool_response, ok

# These will be set when the tools are registered
mcp = None
session_manager = None

logger = logging.getLogger(__name__)


async def list_scenarios() -> Dict[str, Any]:
    """List the built-in figure scenarios with their descriptions."""
    log_tool_call("list_scenarios")
    try:
        entries = []
        for name in builtin_scenarios():
            cfg = load_scenario(name)
            entries.append({"name": name, "description": cfg.description})
        result = ok(f"{len(entries)} built-in scenarios", scenarios=entries)
        log_tool_response("list_scenarios", result)
        return result
    except Exception as e:
        log_tool_response("list_scenarios", None, error=e)
        return handle_tool_error(e, "list scenarios")


async def run_named_scenario(name: str, output_dir: Optional[str] = None) -> Dict[str, Any]:
    """Run a built-in scenario (or a scenario file path) and write its artifacts.

    Args:
        name: Built-in scenario name such as fig1-top, or a path to a JSON scenario
        output_dir: Directory for the artifacts (default output/<name>)

    Returns:
        Manifest path and the list of artifacts written
    """
    log_tool_call("run_named_scenario", name=name, output_dir=output_dir)
    try:
        manifest_path = run_scenario(load_scenario(name), output_dir)
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        result = ok(
            f"Scenario '{name}' finished",
            manifest=str(manifest_path),
            artifacts=manifest["artifacts"],
            runtime_seconds=manifest["runtime_seconds"],
        )
        log_tool_response("run_named_scenario", result)
        return result
    except Exception as e:
        log_tool_response("run_named_scenario", None, error=e)
        return handle_tool_error(e, f"run scenario '{name}'")


def register_scenario_tools(mcp_instance, session_manager_instance):
    """Register the scenario tools"""
    global mcp, session_manager
    mcp = mcp_instance
    session_manager = session_manager_instance

    logger.info("Registering scenario tools...")
    mcp.tool(name="list_scenarios", description="List the built-in figure scenarios.")(list_scenarios)
    mcp.tool(name="run_named_scenario", description="Run a figure scenario and write CSV, PNG and JSON artifacts.")(
        run_named_scenario
    )
    logger.info("Scenario tools registered successfully")
