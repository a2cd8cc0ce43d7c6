"""
PhaseMCP Tools Package

This package contains the MCP tools for states, transforms, the POVM channel,
evolution, diagnostics and scenarios.
"""

# Tools are registered by server.py through the register_*_tools functions
