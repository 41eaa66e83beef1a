"""fermicone: causal-cone contraction of fermionic unitary circuits.

Local expectation values of parity-even observables are computed by
dynamically reordering fermionic modes inside the causal cone, so no global
Jordan-Wigner string operator is ever materialized.
"""

from .circuit import (
    CausalCone,
    Circuit,
    ContractionPlan,
    ContractionStats,
    FermionGate,
    causal_cone,
    contract_expectation,
    reduced_density,
)
from .dense import DenseOperator, exact_ground_energy, global_expectation, global_jwt
from .errors import ResourceLimitError
from .fock import (
    Grading,
    ModeOrder,
    OccupationState,
    OrderedOperator,
    enumerate_basis,
    jw_annihilator,
    parity_blocks,
    represent_polynomial,
    unitary_from_generator,
)
from .lattice import LatticeModel, anderson_bound, build_hamiltonian, free_fermion_energy
from .mera import MeraAnsatz, build_mera, energy, generator_basis
from .optimizer import OptimizeOptions, OptimizeResult, optimize
from .polynomial import FermionPolynomial
from .reorder import (
    FERMIONIC_SWAP,
    ReorderPlan,
    adjacent_swap,
    align_supports,
    conjugate,
    embed,
    partial_project,
    partial_trace,
    prepend_mode,
    reorder,
)

__version__ = "0.1.0"

__all__ = [
    "CausalCone",
    "Circuit",
    "ContractionPlan",
    "ContractionStats",
    "DenseOperator",
    "FERMIONIC_SWAP",
    "FermionGate",
    "FermionPolynomial",
    "Grading",
    "LatticeModel",
    "MeraAnsatz",
    "ModeOrder",
    "OccupationState",
    "OptimizeOptions",
    "OptimizeResult",
    "OrderedOperator",
    "ReorderPlan",
    "ResourceLimitError",
    "adjacent_swap",
    "align_supports",
    "anderson_bound",
    "build_hamiltonian",
    "build_mera",
    "causal_cone",
    "conjugate",
    "contract_expectation",
    "embed",
    "energy",
    "enumerate_basis",
    "exact_ground_energy",
    "free_fermion_energy",
    "generator_basis",
    "global_expectation",
    "global_jwt",
    "jw_annihilator",
    "optimize",
    "parity_blocks",
    "partial_project",
    "partial_trace",
    "prepend_mode",
    "reduced_density",
    "reorder",
    "represent_polynomial",
    "unitary_from_generator",
]
