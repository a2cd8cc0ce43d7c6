"""
Named states shared between tool calls.
"""

import logging
from typing import Any, Dict, List, Union

from phasespace.errors import StateError
from phasespace.grid import Field2D
from phasespace.states import DensityMatrix
from phasespace.transforms import WignerFunction, density_from_wigner, wigner_from_density

logger = logging.getLogger(__name__)

Stored = Union[DensityMatrix, Field2D]


class SessionManager:
    """Keeps density matrices and phase-space fields under user-chosen names"""

    def __init__(self):
        self._states: Dict[str, Stored] = {}
        logger.info("SessionManager initialized")

    def put(self, name: str, value: Stored) -> None:
        if not name:
            raise StateError("state name must not be empty")
        replaced = name in self._states
        self._states[name] = value
        logger.info(f"{'Replaced' if replaced else 'Stored'} state '{name}' ({type(value).__name__})")

    def get(self, name: str) -> Stored:
        if name not in self._states:
            raise StateError(f"no state named '{name}' (have: {', '.join(sorted(self._states)) or 'none'})")
        return self._states[name]

    def get_density(self, name: str) -> DensityMatrix:
        value = self.get(name)
        if isinstance(value, DensityMatrix):
            return value
        if isinstance(value, WignerFunction):
            return density_from_wigner(value)
        raise StateError(f"state '{name}' is a {type(value).__name__}, not a quantum state")

    def get_wigner(self, name: str) -> WignerFunction:
        value = self.get(name)
        if isinstance(value, WignerFunction):
            return value
        if isinstance(value, DensityMatrix):
            return wigner_from_density(value)
        raise StateError(f"state '{name}' is a {type(value).__name__}, not a Wigner function")

    def drop(self, name: str) -> bool:
        return self._states.pop(name, None) is not None

    def describe(self) -> List[Dict[str, Any]]:
        entries = []
        for name, value in sorted(self._states.items()):
            if isinstance(value, DensityMatrix):
                shape, grid = (value.grid.n, value.grid.n), value.grid.model_dump()
            else:
                shape, grid = value.grid.shape, value.grid.model_dump()
            entries.append({"name": name, "type": type(value).__name__, "shape": list(shape), "grid": grid})
        return entries

    async def close_session(self):
        """Forget every stored state"""
        count = len(self._states)
        self._states.clear()
        logger.info(f"Session cleared ({count} states dropped)")
