"""
PhaseMCP Server

Main MCP server for phase-space decoherence simulations.
Provides tools for building quantum states, phase-space transforms, the
coherent-state POVM channel, Lindblad evolution and the figure scenarios.
"""

import logging

from fastmcp import FastMCP

from phasespace.settings import LOG_FORMAT, get_settings, log_handlers
from tools.session import SessionManager
from tools.state_tools import register_state_tools
from tools.transform_tools import register_transform_tools
from tools.povm_tools import register_povm_tools
from tools.evolution_tools import register_evolution_tools
from tools.analysis_tools import register_analysis_tools
from tools.scenario_tools import register_scenario_tools

settings = get_settings()

logging.basicConfig(
    level=settings.logging.level,
    format=LOG_FORMAT,
    handlers=log_handlers(settings),
)
logger = logging.getLogger(__name__)

# Initialize FastMCP server
logger.info("Initializing PhaseMCP server...")
mcp = FastMCP("PhaseMCP")
logger.info("FastMCP server initialized successfully")

# Create global session manager
logger.info("Creating global session manager...")
session_manager = SessionManager()
logger.info("Global session manager created")

# Register all tools
logger.info("Registering MCP tools...")
register_state_tools(mcp, session_manager)
register_transform_tools(mcp, session_manager)
register_povm_tools(mcp, session_manager)
register_evolution_tools(mcp, session_manager)
register_analysis_tools(mcp, session_manager)
register_scenario_tools(mcp, session_manager)
logger.info("All tools registered successfully")

if __name__ == "__main__":
    server = settings.server
    try:
        logger.info("=" * 50)
        if server.transport == "stdio":
            logger.info("Starting PhaseMCP server with stdio transport")
            mcp.run(transport="stdio")
        else:
            logger.info(f"Starting PhaseMCP server on {server.host}:{server.port} with {server.transport} transport")
            logger.info("=" * 50)
            mcp.run(transport=server.transport, host=server.host, port=server.port)

    except KeyboardInterrupt:
        logger.info("Server shutdown requested by user")
    except Exception as e:
        logger.error(f"Server error: {e}", exc_info=True)
    finally:
        logger.info("Performing cleanup...")
        logger.info("PhaseMCP server cleanup completed")
