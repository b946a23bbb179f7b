"""qmmsim: semiclassical 1D quantum-metamaterial simulation and analytics."""

from .core import (
    BlochChain,
    FieldState,
    FiguresOfMerit,
    ModelParams,
    QubitParams,
    figures_of_merit,
    uniform_chain,
    validate_params,
)
from .fields import (
    PolarizationSource,
    PotentialField,
    apply_sponge,
    field_energy,
    step_field_potential,
    step_field_sourced,
)
from .qubits import (
    SuperpositionProfile,
    chain_from_superposition,
    evolve_bloch,
    polarization_from_state,
    potential_from_state,
    potential_from_tunneling,
    qubit_energy,
    step_bloch,
)
from .analytics import (
    BandStructure,
    PeriodicPotential,
    QDParams,
    TransitionParams,
    bloch_bands,
    bragg_qd_stack,
    critical_temp_strong_disorder,
    critical_temp_weak_disorder,
    layered_transmission,
    qd_permittivity,
    quantum_transition_temp,
)
from .scenarios import (
    OnsetResult,
    PulseSpec,
    SpectrumTable,
    detect_onset,
    inverted_chain,
    run_breathing,
    run_lasing,
    run_priming,
    run_scattering,
)

__version__ = "0.1.0"
