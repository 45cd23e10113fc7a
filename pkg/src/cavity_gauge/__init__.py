"""Gauge-relative light and matter subsystems in single-mode cavity QED toy models."""

__version__ = "0.1.0"

from .dipole import DipoleModel, DoubleWellParams, dipole_operator, solve_double_well
from .errors import ConfigError, ConvergenceError, ValidationError
from .hamiltonian import (
    ModelConfig,
    build_alpha_gauge,
    build_dipole_gauge_one,
    build_dipole_gauge_two,
    direct_interaction_coefficient,
    gauge_unitary,
    jc_gauge,
    truncate_two_level,
)
from .hilbert import (
    HermitianOperator,
    TensorSpace,
    UnitaryOperator,
    annihilator,
    conjugate,
    embed,
    hermitian_exp,
    make_space,
)
from .perturbation import (
    PerturbativePoint,
    beta_alpha,
    perturbative_reduced_state,
    ret_matrix_element,
    spontaneous_rate,
)
from .qinfo import (
    DensityMatrix,
    bell_states,
    entanglement_entropy,
    fidelity_pure,
    negativity,
    partial_trace,
    population_difference,
    purity,
    von_neumann_entropy,
)
from .spectra import GroundStateResult, converge_cutoffs, converge_point, energy_shift, ground_state
