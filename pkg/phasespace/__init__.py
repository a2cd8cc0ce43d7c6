"""
Phase-space engine for PhaseMCP

Grids, quantum states, Wigner/Husimi/characteristic transforms, the
coherent-state POVM channel, Lindblad evolution and their diagnostics.
"""
from .errors import (
    BoundaryError,
    ConfigError,
    EvolutionError,
    GridError,
    ParameterError,
    PhaseSpaceError,
    PipelineError,
    StateError,
)
from .grid import Field2D, Grid1D, PhaseSpaceGrid, gaussian_convolve, make_balanced_grid, make_grid
from .states import CoherentLabel, DensityMatrix, WaveFunction, cat_state, coherent_state, fock_state
from .transforms import (
    CharacteristicFunction,
    HusimiFunction,
    WignerFunction,
    characteristic_from_wigner,
    density_from_wigner,
    husimi_from_density,
    wigner_from_characteristic,
    wigner_from_density,
)
from .povm import PhaseSpaceRegion, povm_channel, povm_probability, povm_smooth_wigner, sample_povm_outcome
from .lindblad import (
    EvolutionSpec,
    evolve_composed,
    evolve_harmonic_rotation,
    evolve_master_oracle,
    evolve_phase_space_lindblad,
    evolve_position_lindblad,
)
from .analysis import StateMetrics, compare_fields, phase_space_stats

__version__ = "0.1.0"

__all__ = [
    'BoundaryError',
    'ConfigError',
    'EvolutionError',
    'GridError',
    'ParameterError',
    'PhaseSpaceError',
    'PipelineError',
    'StateError',
    'Field2D',
    'Grid1D',
    'PhaseSpaceGrid',
    'gaussian_convolve',
    'make_balanced_grid',
    'make_grid',
    'CoherentLabel',
    'DensityMatrix',
    'WaveFunction',
    'cat_state',
    'coherent_state',
    'fock_state',
    'CharacteristicFunction',
    'HusimiFunction',
    'WignerFunction',
    'characteristic_from_wigner',
    'density_from_wigner',
    'husimi_from_density',
    'wigner_from_characteristic',
    'wigner_from_density',
    'PhaseSpaceRegion',
    'povm_channel',
    'povm_probability',
    'povm_smooth_wigner',
    'sample_povm_outcome',
    'EvolutionSpec',
    'evolve_composed',
    'evolve_harmonic_rotation',
    'evolve_master_oracle',
    'evolve_phase_space_lindblad',
    'evolve_position_lindblad',
    'StateMetrics',
    'compare_fields',
    'phase_space_stats',
]
