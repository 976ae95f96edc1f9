"""The incomplete-teleportation channel and the observable transport rule.

Alice holds the particle to teleport (slot a') plus one half (a) of a
shared two-particle singlet whose other half (b) sits with Bob; an
optional spectator slot b' of the input state also sits with Bob.  She
measures only whether her pair (a, a') has total spin zero, i.e. the
two-outcome projective measurement {pi0, pi1}, and sends the outcome bit.

Outcome 0 teleports the input exactly; outcome 1 leaves a fixed affine
deformation of it.  Because both branch states are known functions of the
input, any target observable W splits into a per-branch pair (W0, W1)
whose conditional expectations each equal Tr(W rho), so the protocol
measures W without any shared reference frame: the spin-zero measurement
commutes with identical rotations on both of Alice's particles.

Index bookkeeping: multiparticle operators are ordered (a', [b',] a, b)
with the slow-index-first convention of :mod:`telewitness.linalg`; branch
outputs are reported on (b, [b']) so they compare directly against the
input written on (a', [b']).  The spin-zero projector is symmetric under
swapping its two particles, so placing it on (a', a) and on (a, a') are
the same operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    SubsystemDims,
    as_matrix,
    dagger,
    is_hermitian,
    is_unitary,
    kron,
    frobenius_distance,
    partial_trace,
    permute_subsystems,
    readonly,
)
from .spin import spin_of_dim, spin_projectors
from .states import DensityMatrix, pure_state_density
from .witnesses import Witness, witness


@dataclass(frozen=True)
class BranchOutcome:
    """One measurement branch: its index, probability, the unnormalized
    channel output, and the normalized post-measurement state."""

    index: int
    probability: float
    unnormalized: np.ndarray
    state: DensityMatrix


@dataclass(frozen=True)
class WitnessPair:
    """Per-branch observables (w0, w1) for a target witness, plus the
    first-subsystem marginal w2 = Tr_1 W entering w1."""

    w0: Witness
    w1: Witness
    marginal: np.ndarray


@dataclass(frozen=True)
class ObservablePair:
    """Raw-matrix counterpart of WitnessPair for arbitrary Hermitian
    observables."""

    op0: np.ndarray
    op1: np.ndarray
    marginal: np.ndarray


class ProtocolError(RuntimeError):
    """An internal protocol identity failed beyond tolerance."""


def _input_layout(rho: DensityMatrix, d: int) -> tuple[np.ndarray, int | None]:
    m = as_matrix(rho.matrix)
    if rho.dims is None:
        if m.shape[0] != d:
            raise ValueError(f"single-particle state has dimension {m.shape[0]}, expected {d}")
        return m, None
    if rho.dims.dim_a != d:
        raise ValueError(f"first subsystem has dimension {rho.dims.dim_a}, expected {d}")
    return m, rho.dims.dim_b


def teleport_branches(
    rho: DensityMatrix,
    d: int,
    projectors: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[BranchOutcome, BranchOutcome]:
    """Operational channel: append the singlet, sandwich with Alice's
    projectors, and trace out her particles.

    ``rho`` is a single-particle state of dimension d or a bipartite
    state whose first subsystem (the teleported share) has dimension d.
    ``projectors`` overrides Alice's {pi0, pi1} pair (used to model a
    misaligned frame); by default the spin-zero pair is used.
    """
    d = int(d)
    mat, spectator = _input_layout(rho, d)
    if projectors is None:
        projectors = spin_projectors(d)
    pi0, pi1 = (as_matrix(p) for p in projectors)
    if pi0.shape != (d * d, d * d):
        raise ValueError(f"projectors must act on two dimension-{d} particles")

    psi = spin_projectors(d)[0]  # singlet density matrix on (a, b)
    full = kron(mat, psi)

    outcomes = []
    for index, pi in enumerate((pi0, pi1)):
        if spectator is None:
            # ordering (a', a, b): Alice's pair is already contiguous
            sandwich = kron(pi, np.eye(d))
            x_full = sandwich @ full @ sandwich
            x = partial_trace(x_full, SubsystemDims(d * d, d), which="first")
        else:
            e = spectator
            # build pi on (a', a) ⊗ I(b') ⊗ I(b), then reorder to (a', b', a, b)
            sandwich = permute_subsystems(
                kron(pi, np.eye(e * d)), (d, d, e, d), (0, 2, 1, 3)
            )
            x_full = sandwich @ full @ sandwich
            # group Alice's particles in front, trace them, then put the
            # teleported slot (b) before the spectator (b')
            regrouped = permute_subsystems(x_full, (d, e, d, d), (0, 2, 1, 3))
            x = partial_trace(regrouped, SubsystemDims(d * d, e * d), which="first")
            x = permute_subsystems(x, (e, d), (1, 0))
        p = float(np.trace(x).real)
        dims = None if spectator is None else SubsystemDims(d, spectator)
        state = DensityMatrix(readonly(x / p), dims)
        outcomes.append(BranchOutcome(index, p, readonly(x), state))
    return outcomes[0], outcomes[1]


def closed_form_branches(rho: DensityMatrix, d: int) -> tuple[BranchOutcome, BranchOutcome]:
    """Analytic branch states: outcome 0 returns the input with
    probability 1/d^2; outcome 1 returns
    ((2j+1) I (x) rho_2 - rho) / (4j(j+1)) with rho_2 the spectator
    marginal (the identity's normalized trace for single-particle input).
    """
    d = int(d)
    mat, spectator = _input_layout(rho, d)
    j = spin_of_dim(d)
    denom = 4.0 * j * (j + 1.0)  # = d^2 - 1
    p0 = 1.0 / d**2
    p1 = 1.0 - p0

    if spectator is None:
        deformed = (d * np.eye(d) - mat) / denom
        dims = None
    else:
        deformed = (d * kron(np.eye(d), rho.marginal("first")) - mat) / denom
        dims = SubsystemDims(d, spectator)

    branch0 = BranchOutcome(0, p0, readonly(p0 * mat), DensityMatrix(readonly(mat), dims))
    branch1 = BranchOutcome(1, p1, readonly(p1 * deformed), DensityMatrix(readonly(deformed), dims))
    return branch0, branch1


def transform_observable(g: np.ndarray, d: int, tol: float = DEFAULT_TOL) -> ObservablePair:
    """Per-branch observables for a Hermitian bipartite g whose first
    subsystem has dimension d:

        g0 = g
        g1 = (2j+1) I (x) g2 - 4j(j+1) g,   g2 = Tr_1 g.
    """
    d = int(d)
    g = as_matrix(g)
    if g.shape[0] % d != 0 or g.shape[0] // d < 2:
        raise ValueError(f"observable dimension {g.shape[0]} incompatible with local dimension {d}")
    if not is_hermitian(g, tol):
        raise ValueError("observable must be Hermitian")
    j = spin_of_dim(d)
    e = g.shape[0] // d
    g2 = partial_trace(g, SubsystemDims(d, e), which="first")
    g1 = d * kron(np.eye(d), g2) - 4.0 * j * (j + 1.0) * g
    return ObservablePair(readonly(g), readonly(g1), readonly(g2))


def transform_witness(w: Witness, d: int, tol: float = DEFAULT_TOL) -> WitnessPair:
    """Witness-typed wrapper of :func:`transform_observable`."""
    pair = transform_observable(w.matrix, d, tol)
    return WitnessPair(
        w0=witness(pair.op0, w.dims, w.label + "#0", tol),
        w1=witness(pair.op1, w.dims, w.label + "#1", tol),
        marginal=pair.marginal,
    )


def expectation(op: np.ndarray, state: DensityMatrix | np.ndarray) -> float:
    mat = state.matrix if isinstance(state, DensityMatrix) else state
    return float(np.trace(as_matrix(op) @ as_matrix(mat)).real)


def protocol_expectation(rho: DensityMatrix, w: Witness, d: int, tol: float = 1e-8) -> float:
    """Protocol estimate p0 Tr(w0 rho0) + p1 Tr(w1 rho1) computed through
    the operational channel.

    Both the combined value and each conditional term equal Tr(W rho);
    violations beyond tol raise ProtocolError.
    """
    if rho.dims is None or w.dims != rho.dims:
        raise ValueError("state and witness must share bipartite dims")
    b0, b1 = teleport_branches(rho, d)
    pair = transform_witness(w, d)
    cond0 = expectation(pair.w0.matrix, b0.state)
    cond1 = expectation(pair.w1.matrix, b1.state)
    combined = b0.probability * cond0 + b1.probability * cond1
    direct = expectation(w.matrix, rho)
    scale = 1.0 + abs(direct)
    for name, value in (("branch-0", cond0), ("branch-1", cond1), ("combined", combined)):
        if abs(value - direct) > tol * scale:
            raise ProtocolError(
                f"{name} expectation {value} deviates from direct value {direct}"
            )
    return combined


@dataclass(frozen=True)
class MisalignmentReport:
    """Aligned vs rotated-frame protocol runs for one rotation."""

    p0_aligned: float
    p0_misaligned: float
    branch_state_distances: tuple[float, float]
    expectation_aligned: float
    expectation_misaligned: float
    projector_distance: float

    @property
    def max_probability_deviation(self) -> float:
        return abs(self.p0_aligned - self.p0_misaligned)

    @property
    def max_state_deviation(self) -> float:
        return max(self.branch_state_distances)


def misaligned_protocol(
    rho: DensityMatrix, w: Witness, d: int, rotation: np.ndarray, tol: float = DEFAULT_TOL
) -> MisalignmentReport:
    """Re-run the channel with Alice's measurement conjugated by R (x) R
    on her two particles, modeling an unknown relative frame.

    The spin-zero projector is invariant under identical rotations, so
    every reported quantity matches the aligned run; the report carries
    the observed deviations.
    """
    r = as_matrix(rotation)
    if not is_unitary(r, max(tol, 1e-9)):
        raise ValueError("rotation must be unitary")
    pi0, pi1 = spin_projectors(d)
    u = kron(r, r)
    rotated = (u @ pi0 @ dagger(u), u @ pi1 @ dagger(u))

    aligned = teleport_branches(rho, d)
    tilted = teleport_branches(rho, d, projectors=rotated)
    pair = transform_witness(w, d)

    def combined(branches):
        return sum(b.probability * expectation(getattr(pair, f"w{b.index}").matrix, b.state) for b in branches)

    return MisalignmentReport(
        p0_aligned=aligned[0].probability,
        p0_misaligned=tilted[0].probability,
        branch_state_distances=tuple(
            frobenius_distance(a.state.matrix, t.state.matrix) for a, t in zip(aligned, tilted)
        ),
        expectation_aligned=combined(aligned),
        expectation_misaligned=combined(tilted),
        projector_distance=frobenius_distance(rotated[0], pi0),
    )


def qubit_depolarized(rho: DensityMatrix) -> np.ndarray:
    """Independent oracle for the outcome-1 single-qubit channel:
    (X rho X + Y rho Y + Z rho Z) / 3."""
    if rho.dims is not None or rho.dim != 2:
        raise ValueError("expects a single-qubit state")
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    m = rho.matrix
    return (sx @ m @ sx + sy @ m @ sy + sz @ m @ sz) / 3.0


def swapped_verdict_consistent(vector: np.ndarray, w: Witness, d: int, tol: float = 1e-9) -> bool:
    """For a pure bipartite input, the protocol estimate and the direct
    trace agree in value (hence in detection verdict)."""
    rho = pure_state_density(vector, w.dims)
    value = protocol_expectation(rho, w, d)
    direct = expectation(w.matrix, rho)
    return abs(value - direct) <= tol * (1.0 + abs(direct))
