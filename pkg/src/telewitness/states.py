"""State constructors, the separable ensemble certificate, and the
positive-partial-transpose entanglement oracle.

The PPT verdict is exact for local dimensions 2x2 and 2x3 (there
"not detected" means separable) and one-sided everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    SubsystemDims,
    as_matrix,
    is_hermitian,
    kron,
    partial_trace,
    partial_transpose,
    readonly,
)
from .spin import singlet_state


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one positive-semidefinite operator, optionally bipartite.

    ``dims`` is ``None`` for a single-particle state; otherwise the usual
    slow-index-first subsystem split.
    """

    matrix: np.ndarray
    dims: SubsystemDims | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def marginal(self, which: str = "first") -> np.ndarray:
        """Reduced state left after tracing out the named subsystem."""
        if self.dims is None:
            raise ValueError("marginal requires a bipartite state")
        return partial_trace(self.matrix, self.dims, which=which)


def density_matrix(matrix, dims: SubsystemDims | None = None, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Validate and freeze a density matrix (Hermitian, PSD, unit trace)."""
    m = as_matrix(matrix)
    if dims is not None:
        dims = SubsystemDims(*dims)
        if dims.dim_a < 2 or dims.dim_b < 2:
            raise ValueError(f"local dimensions must be >= 2, got {tuple(dims)}")
        if m.shape[0] != dims.total:
            raise ValueError(f"matrix dimension {m.shape[0]} != product of dims {tuple(dims)}")
    if not is_hermitian(m, tol):
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(m).real - 1.0) > tol:
        raise ValueError(f"density matrix must have unit trace, got {np.trace(m).real}")
    if float(np.linalg.eigvalsh(m).min()) < -tol:
        raise ValueError("density matrix must be positive semidefinite")
    return DensityMatrix(readonly(m), dims)


def pure_state_density(vector, dims: SubsystemDims | None = None) -> DensityMatrix:
    """|psi><psi| from a normalized state vector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state vector must be normalized, got norm {norm}")
    return DensityMatrix(readonly(np.outer(v, v.conj())), dims)


def random_density(dim: int, rank: int, seed: int, dims: SubsystemDims | None = None) -> DensityMatrix:
    """Seeded Ginibre state: normalize G @ G+ for a dim x rank complex
    Gaussian G.  Unitarily invariant in distribution; the same seed gives
    a bit-identical matrix."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(readonly(m), dims)


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class SeparableEnsemble:
    """Convex decomposition certificate: (weight, local A state, local B
    state) triples whose product mixture reproduces the state."""

    terms: tuple[tuple[float, np.ndarray, np.ndarray], ...]

    def assemble(self) -> np.ndarray:
        return sum(p * kron(a, b) for p, a, b in self.terms)


def random_separable(dims: SubsystemDims, terms: int, seed: int) -> tuple[DensityMatrix, SeparableEnsemble]:
    """Seeded convex mixture of random pure product states, returned with
    its decomposition certificate."""
    dims = SubsystemDims(*dims)
    if terms < 1:
        raise ValueError(f"need at least one term, got {terms}")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms)) if terms > 1 else np.ones(1)
    triples = []
    for p in weights:
        va = random_pure_vector(dims.dim_a, rng)
        vb = random_pure_vector(dims.dim_b, rng)
        triples.append((float(p), readonly(np.outer(va, va.conj())), readonly(np.outer(vb, vb.conj()))))
    ensemble = SeparableEnsemble(tuple(triples))
    return density_matrix(ensemble.assemble(), dims), ensemble


def werner_state(p: float) -> DensityMatrix:
    """p * |psi-><psi-| + (1-p) * I/4 on two qubits; entangled exactly for
    p > 1/3."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {p}")
    psi = singlet_state(2)
    m = p * np.outer(psi, psi.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(readonly(m), SubsystemDims(2, 2))


def bell_state(m: int, n: int, d: int) -> np.ndarray:
    """Generalized Bell vector (1/sqrt(d)) * sum_k w^{km} |k, k+n mod d>
    with w = exp(2*pi*i/d)."""
    d = int(d)
    if not (0 <= m < d and 0 <= n < d):
        raise ValueError(f"Bell indices must lie in [0, {d}), got ({m}, {n})")
    omega = np.exp(2j * np.pi / d)
    v = np.zeros(d * d, dtype=complex)
    for k in range(d):
        v[k * d + (k + n) % d] += omega ** (k * m)
    return v / np.sqrt(d)


def ppt_is_entangled(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Peres-Horodecki check: True iff the partial transpose has an
    eigenvalue below -tol.  False means "not detected"; that is
    conclusive separability only for 2x2 and 2x3 systems."""
    if rho.dims is None:
        raise ValueError("PPT criterion needs a bipartite state with dims attached")
    pt = partial_transpose(rho.matrix, rho.dims, which="second")
    return float(np.linalg.eigvalsh(pt).min()) < -tol
