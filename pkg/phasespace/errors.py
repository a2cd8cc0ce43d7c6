"""
Exception hierarchy for the phase-space engine.

Library code raises these; the CLI maps them to exit codes and the MCP tools
turn them into error dictionaries.
"""


class PhaseSpaceError(Exception):
    """Base class for every engine failure"""


class GridError(PhaseSpaceError):
    """Unusable discretization or mismatched grids"""


class StateError(PhaseSpaceError):
    """Invalid state parameters or corrupted state data"""


class BoundaryError(PhaseSpaceError):
    """The operation would wrap around the periodic domain"""


class EvolutionError(PhaseSpaceError):
    """Time stepping failed (instability, too few splitting steps)"""


class ConfigError(PhaseSpaceError):
    """Configuration or scenario file failed validation"""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ParameterError(PhaseSpaceError, ValueError):
    """A numerical parameter is outside its allowed range"""


class PipelineError(PhaseSpaceError):
    """A scenario step failed; carries the step index and the original error"""

    def __init__(self, step: int, op: str, cause: Exception):
        self.step = step
        self.op = op
        self.cause = cause
        super().__init__(f"pipeline step {step} ({op}) failed: {cause}")
