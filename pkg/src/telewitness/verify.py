"""Named analytic identity checks behind the ``verify`` CLI command.

Each check exercises one library invariant across a dimension range and
returns its worst observed error.  The registry doubles as a manifest so
tests can assert that every documented invariant is covered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .circuits import (
    singlet_prep_circuit,
    spin_zero_meas_via_circuit,
    spin_zero_overlap,
    standard_gates,
)
from .linalg import DEFAULT_TOL, SubsystemDims, dagger, frobenius_distance, kron, partial_trace
from .protocol import (
    closed_form_branches,
    expectation,
    misaligned_protocol,
    protocol_expectation,
    qubit_depolarized,
    teleport_branches,
    transform_witness,
)
from .spin import angular_momentum_ops, random_rotation, singlet_state, spin_projectors, total_angular_momentum_ops
from .states import DensityMatrix, density_matrix, random_density
from .witnesses import witness


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    detail: str


def _random_state(dim: int, rng: np.random.Generator, dims: SubsystemDims | None = None) -> DensityMatrix:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return density_matrix(m, dims)


def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + dagger(g)) / 2.0


def check_pauli_correspondence(dmax: int, rng: np.random.Generator) -> tuple[float, str]:
    """j=1/2 operators reproduce the halved Paulis once the basis is
    flipped to spin-up-first order."""
    ops = angular_momentum_ops(2)
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    splus = np.array([[0, 1], [0, 0]], dtype=complex)
    err = max(
        frobenius_distance(flip @ ops["jz"] @ flip, sz / 2),
        frobenius_distance(flip @ ops["jx"] @ flip, sx / 2),
        frobenius_distance(flip @ ops["jy"] @ flip, sy / 2),
        frobenius_distance(flip @ ops["jplus"] @ flip, splus),
    )
    return err, "j=1/2 vs sigma/2 and sigma+"


def check_singlet_annihilation(dmax: int, rng: np.random.Generator) -> tuple[float, str]:
    """Total Jz and J+- annihilate the singlet for every d."""
    err = 0.0
    for d in range(2, dmax + 1):
        psi = singlet_state(d)
        total = total_angular_momentum_ops(d)
        for key in ("jz", "jplus", "jminus"):
            err = max(err, float(np.linalg.norm(total[key] @ psi)))
    return err, f"d=2..{dmax}, all generators"


def check_singlet_rotation_invariance(dmax: int, rng: np.random.Generator, rounds: int = 20) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        psi = singlet_state(d)
        for _ in range(rounds):
            r = random_rotation(d, rng)
            err = max(err, float(np.linalg.norm(kron(r, r) @ psi - psi)))
    return err, f"{rounds} random rotations per d"


def check_projector_rotation_invariance(dmax: int, rng: np.random.Generator, rounds: int = 20) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        pi0, _ = spin_projectors(d)
        for _ in range(rounds):
            r = random_rotation(d, rng)
            u = kron(r, r)
            err = max(err, frobenius_distance(u @ pi0 @ dagger(u), pi0))
    return err, f"{rounds} random rotations per d"


def check_witness_transport_identity(dmax: int, rng: np.random.Generator, rounds: int = 20) -> tuple[float, str]:
    """Tr(W1 rho1) = Tr(W rho) with rho1 from the operational channel."""
    err = 0.0
    for d in range(2, dmax + 1):
        dims = SubsystemDims(d, d)
        for _ in range(rounds):
            rho = _random_state(d * d, rng, dims)
            w = witness(_random_hermitian(d * d, rng), dims)
            _, b1 = teleport_branches(rho, d)
            pair = transform_witness(w, d)
            lhs = expectation(pair.w1.matrix, b1.state)
            rhs = expectation(w.matrix, rho)
            err = max(err, abs(lhs - rhs))
    return err, f"{rounds} random (rho, W) per d"


def check_qubit_kraus_form(dmax: int, rng: np.random.Generator, rounds: int = 25) -> tuple[float, str]:
    """Operational single-qubit outcome-1 channel equals the Pauli twirl
    (X.X + Y.Y + Z.Z)/3 and the affine form 2I/3 - rho/3."""
    err = 0.0
    for _ in range(rounds):
        rho = _random_state(2, rng)
        _, b1 = teleport_branches(rho, 2)
        twirl = qubit_depolarized(rho)
        affine = (2.0 * np.eye(2) - rho.matrix) / 3.0
        err = max(err, frobenius_distance(b1.state.matrix, twirl), frobenius_distance(b1.state.matrix, affine))
    return err, f"{rounds} random qubit states"


def check_proof_trace_identities(dmax: int, rng: np.random.Generator, rounds: int = 10) -> tuple[float, str]:
    """The two marginal trace identities behind the transport proof."""
    err = 0.0
    for d in range(2, dmax + 1):
        dims = SubsystemDims(d, d)
        eye = np.eye(d)
        for _ in range(rounds):
            rho = _random_state(d * d, rng, dims)
            w = _random_hermitian(d * d, rng)
            w2 = partial_trace(w, dims, "first")
            rho2 = rho.marginal("first")
            t = float(np.trace(w2 @ rho2).real)
            err = max(err, abs(float(np.trace(kron(eye, w2) @ kron(eye, rho2)).real) - d * t))
            err = max(err, abs(float(np.trace(kron(eye, w2) @ rho.matrix).real) - t))
            err = max(err, abs(float(np.trace(w @ kron(eye, rho2)).real) - t))
    return err, f"{rounds} random (rho, W) per d"


def check_branch_probabilities(dmax: int, rng: np.random.Generator, rounds: int = 10) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        dims = SubsystemDims(d, d)
        for _ in range(rounds):
            rho = _random_state(d * d, rng, dims)
            b0, b1 = teleport_branches(rho, d)
            err = max(err, abs(b0.probability + b1.probability - 1.0))
            err = max(err, abs(b0.probability - 1.0 / d**2))
    return err, f"p0 + p1 = 1 and p0 = 1/d^2"


def check_swap_verdict_consistency(dmax: int, rng: np.random.Generator, rounds: int = 10) -> tuple[float, str]:
    """Protocol expectation equals the direct trace for random inputs, so
    detection verdicts always agree."""
    err = 0.0
    for d in range(2, dmax + 1):
        dims = SubsystemDims(d, d)
        for _ in range(rounds):
            rho = _random_state(d * d, rng, dims)
            w = witness(_random_hermitian(d * d, rng), dims)
            value = protocol_expectation(rho, w, d)
            err = max(err, abs(value - expectation(w.matrix, rho)))
    return err, f"{rounds} random (rho, W) per d"


def check_misalignment_invariance(dmax: int, rng: np.random.Generator, rounds: int = 5) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        dims = SubsystemDims(d, d)
        rho = _random_state(d * d, rng, dims)
        w = witness(_random_hermitian(d * d, rng), dims)
        for _ in range(rounds):
            report = misaligned_protocol(rho, w, d, random_rotation(d, rng))
            err = max(
                err,
                report.projector_distance,
                report.max_probability_deviation,
                report.max_state_deviation,
                abs(report.expectation_aligned - report.expectation_misaligned),
            )
    return err, f"{rounds} random rotations per d"


def check_gates_unitary(dmax: int, rng: np.random.Generator) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        gates = standard_gates(d)
        for name, g in gates.items():
            err = max(err, float(np.abs(dagger(g) @ g - np.eye(g.shape[0])).max()))
        cnot = np.abs(gates["CNOT"])
        ok_perm = np.allclose(cnot.sum(axis=0), 1.0) and np.allclose(cnot.sum(axis=1), 1.0)
        if not ok_perm:
            err = max(err, 1.0)
    return err, "all gate kinds, CNOT permutation structure"


def check_hadamard_square_negation(dmax: int, rng: np.random.Generator) -> tuple[float, str]:
    """H^2 equals the index-negation permutation, hence (H^2)^2 = I."""
    err = 0.0
    for d in range(2, dmax + 1):
        h = standard_gates(d)["H"]
        h2 = h @ h
        negation = np.zeros((d, d), dtype=complex)
        for k in range(d):
            negation[(-k) % d, k] = 1.0
        err = max(err, frobenius_distance(h2, negation))
        err = max(err, frobenius_distance(h2 @ h2, np.eye(d)))
    return err, f"d=2..{dmax}"


def check_circuit_prepares_singlet(dmax: int, rng: np.random.Generator) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        prepared = singlet_prep_circuit(d).unitary()[:, 0]
        err = max(err, float(np.linalg.norm(prepared - singlet_state(d))))
    return err, f"circuit output vs analytic singlet, d=2..{dmax}"


def check_circuit_projector_equivalence(dmax: int, rng: np.random.Generator, rounds: int = 20) -> tuple[float, str]:
    err = 0.0
    for d in range(2, dmax + 1):
        for _ in range(rounds):
            v = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
            v /= np.linalg.norm(v)
            err = max(err, abs(spin_zero_meas_via_circuit(d, v) - spin_zero_overlap(d, v)))
    return err, f"{rounds} random states per d"


# name -> (function, tolerance, source module of the invariant)
CHECKS: dict[str, tuple[Callable, float, str]] = {
    "pauli-correspondence": (check_pauli_correspondence, DEFAULT_TOL, "spin"),
    "singlet-annihilation": (check_singlet_annihilation, DEFAULT_TOL, "spin"),
    "singlet-rotation-invariance": (check_singlet_rotation_invariance, 1e-9, "spin"),
    "projector-rotation-invariance": (check_projector_rotation_invariance, 1e-9, "spin"),
    "witness-transport-identity": (check_witness_transport_identity, 1e-9, "protocol"),
    "qubit-kraus-form": (check_qubit_kraus_form, DEFAULT_TOL, "protocol"),
    "proof-trace-identities": (check_proof_trace_identities, 1e-9, "protocol"),
    "branch-probabilities": (check_branch_probabilities, 1e-12, "protocol"),
    "swap-verdict-consistency": (check_swap_verdict_consistency, 1e-9, "protocol"),
    "misalignment-invariance": (check_misalignment_invariance, 1e-9, "protocol"),
    "gates-unitary": (check_gates_unitary, 1e-12, "circuits"),
    "hadamard-square-negation": (check_hadamard_square_negation, 1e-12, "circuits"),
    "circuit-prepares-singlet": (check_circuit_prepares_singlet, DEFAULT_TOL, "circuits"),
    "circuit-projector-equivalence": (check_circuit_projector_equivalence, DEFAULT_TOL, "circuits"),
}


def run_checks(dmax: int = 4, seed: int = 0, tolerance_scale: float = 1.0) -> list[CheckResult]:
    """Run every registered check for dimensions 2..dmax."""
    if dmax < 2:
        raise ValueError(f"dmax must be >= 2, got {dmax}")
    results = []
    for name, (func, tol, _module) in CHECKS.items():
        rng = np.random.default_rng(seed)
        err, detail = func(dmax, rng)
        bound = tol * tolerance_scale
        results.append(CheckResult(name, err <= bound, err, bound, detail))
    return results
