"""Reference-frame-free entanglement witnessing via incomplete teleportation.

Alice and Bob share a two-particle singlet and an unknown bipartite state.
Alice measures only whether her pair has total spin zero -- a rotation
invariant question -- and sends Bob the single resulting bit; Bob then
measures one of two fixed observables derived from the target witness.
Both conditional expectations equal Tr(W rho), so the pair can evaluate
any entanglement witness (or any observable) with no shared reference
frame, at the cost of one singlet and one classical bit per shot.

The package provides the exact channel and its closed forms, witness
families, qudit circuits for singlet preparation and the spin-zero
measurement, a shot-level sampler, a two-party LOCC session layer, and a
CLI (``telewitness``) that runs experiments and the analytic verification
suite.
"""

from .linalg import (
    DEFAULT_TOL,
    SubsystemDims,
    expm_hermitian,
    frobenius_distance,
    kron,
    partial_trace,
    partial_transpose,
    permute_subsystems,
)
from .spin import (
    angular_momentum_ops,
    rotation_matrix,
    singlet_state,
    spin_of_dim,
    spin_projectors,
)
from .states import (
    DensityMatrix,
    SeparableEnsemble,
    bell_state,
    density_matrix,
    ppt_is_entangled,
    pure_state_density,
    random_density,
    random_separable,
    werner_state,
)
from .witnesses import Witness, riccardi_witness, validate_witness, witness
from .protocol import (
    BranchOutcome,
    WitnessPair,
    closed_form_branches,
    misaligned_protocol,
    protocol_expectation,
    teleport_branches,
    transform_observable,
    transform_witness,
)
from .circuits import (
    Gate,
    QuditCircuit,
    apply_circuit,
    singlet_prep_circuit,
    spin_zero_meas_via_circuit,
    standard_gates,
)
from .sampling import (
    Estimate,
    ShotRecord,
    estimate_witness_value,
    sample_branch,
    sample_eigen_outcome,
    simulate_shots,
)
from .session import SessionConfig, SessionTranscript, run_session

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "SubsystemDims",
    "expm_hermitian",
    "frobenius_distance",
    "kron",
    "partial_trace",
    "partial_transpose",
    "permute_subsystems",
    "angular_momentum_ops",
    "rotation_matrix",
    "singlet_state",
    "spin_of_dim",
    "spin_projectors",
    "DensityMatrix",
    "SeparableEnsemble",
    "bell_state",
    "density_matrix",
    "ppt_is_entangled",
    "pure_state_density",
    "random_density",
    "random_separable",
    "werner_state",
    "Witness",
    "riccardi_witness",
    "validate_witness",
    "witness",
    "BranchOutcome",
    "WitnessPair",
    "closed_form_branches",
    "misaligned_protocol",
    "protocol_expectation",
    "teleport_branches",
    "transform_observable",
    "transform_witness",
    "Gate",
    "QuditCircuit",
    "apply_circuit",
    "singlet_prep_circuit",
    "spin_zero_meas_via_circuit",
    "standard_gates",
    "Estimate",
    "ShotRecord",
    "estimate_witness_value",
    "sample_branch",
    "sample_eigen_outcome",
    "simulate_shots",
    "SessionConfig",
    "SessionTranscript",
    "run_session",
]
