"""pstnet: design, fit, and verify perfect-transfer Hamiltonians on networks.

The workflow mirrors the physics: enumerate a multi-excitation basis (fock),
choose a transfer target and take its exact eigenstructure (targets), build
the family of Hamiltonians realizing it (synthesis) or a physical lattice
model (lattice), evolve and score (dynamics), and recover lattice parameters
numerically (design).
"""

from .design import (
    FitProblem,
    FitResult,
    dedupe_solutions,
    evaluate_table1,
    fit_to_spectrum,
    fit_to_target,
    reproduce_table2,
)
from .dynamics import (
    TimeSeries,
    evolve,
    occupation_probabilities,
    occupation_trace,
    subspace_leakage,
    time_grid,
    trace_probabilities,
    transfer_fidelity,
)
from .fock import (
    Basis,
    BasisSpec,
    BasisState,
    SpecificationError,
    SubspacePartition,
    enumerate_basis,
    partition_two_excitation,
)
from .lattice import (
    CouplingLayout,
    ModelParams,
    apply_centrosymmetry,
    build_hamiltonian,
    commutator_residual,
    decoupling_margin,
    inverse_distance_couplings,
    nn_pst_chain,
)
from .operators import ConvergenceError, HermitianOperator, jacobi_eigh
from .presets import DEFAULT_SEED
from .synthesis import (
    PlanError,
    SpectralPlan,
    VerificationReport,
    effective_focusing_hamiltonian,
    focusing_parameters,
    random_plan,
    synthesize,
    synthesize_with_energies,
    verify_pst,
)
from .targets import (
    Cycle,
    CycleSpectrum,
    TargetTransform,
    cycle_decomposition,
    cycle_spectrum,
    mirror_permutation,
    parity_permutation,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
