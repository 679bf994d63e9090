"""Two-species bosonic Josephson junction as a 2D waveguide lattice."""
from .angular import (
    SpinLabel,
    analytic_amplitude,
    analytic_imbalance,
    analytic_probability,
    clebsch_gordan,
    coupled_state,
    imbalance_convolution,
    wigner_d,
    wigner_d_matrix,
)
from .errors import (
    BJJError,
    ConfigurationError,
    DomainError,
    InfeasibleGeometryError,
    NumericalError,
    OutputError,
)
from .lattice import (
    EffectiveHamiltonian,
    FockLabel,
    LatticeShape,
    ModelParams,
    build_hamiltonian,
    coupling_a,
    coupling_b,
    detuning,
    shifted_detuning,
)
from .observables import (
    ImbalanceDistribution,
    imbalance_distribution,
    mean_imbalance,
    odd_suppression_metric,
    sign_flip_check,
    site_probabilities,
    variance_imbalance,
)
from .photonics import (
    FUSED_SILICA,
    CouplingLaw,
    WaveguideLayout,
    build_layout,
    diagonal_overlay,
    distance_for_coupling,
)
from .propagation import AmplitudeField, SpectralPropagator, decompose, evolve, evolve_trajectory
from .scenario import ScenarioConfig, emit, preset_config, resolve_initial_state, run_scenario

__version__ = "0.1.0"
