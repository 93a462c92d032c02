"""Numerical lab for pointer-based quantum measurement.

A system observable is coupled to the momentum of one or more pointer
wavepackets; the package evolves the joint state exactly, reads the
pointers out against closed-form predictions, and decides whether the
resulting measurement record is separable, dial by dial.
"""

from .engine import (
    Coupling,
    OrthogonalPostselection,
    PostselectionResult,
    UnifiedState,
    apparatus_density,
    build_initial,
    cross_validate,
    evolve,
    evolve_sequential,
    expand_perturbative,
    initial_info_expectation,
    pointer_cross_mean,
    pointer_mean,
    postselect,
    system_density,
    weak_value,
)
from .pointer import (
    LeakageError,
    PointerGrid,
    PointerSpec,
    gaussian_leakage,
    gaussian_state,
    momentum_operator,
    position_operator,
    translate,
)
from .separability import (
    NonCommutingError,
    SeparabilityVerdict,
    SeparableDecomposition,
    commuting_decomposition,
    first_order_product_certificate,
    ppt_min_eigenvalue,
    readability_check,
    sequential_decomposition,
)
from .scenarios import (
    DEFAULTS,
    SCENARIOS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ScenarioConfig,
    ScenarioReport,
    bloch_state,
    pauli,
    run_scenario,
)
from .tensors import (
    DensityMatrix,
    DimensionSpec,
    Operator,
    StateVector,
    eigh,
    expectation,
    kron_operators,
    kron_states,
    partial_trace,
    pure_density,
    schmidt,
    trace_distance,
    unitary_from_generator,
)

__version__ = "0.1.0"
