"""Entanglement witnesses: the partial-transposed Bell-superposition
family and a product-state validity checker.

A witness is Hermitian, nonnegative on every separable state, and (when
strict) has at least one negative eigenvalue so that a measured negative
expectation certifies entanglement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, SubsystemDims, as_matrix, is_hermitian, partial_transpose, readonly
from .states import bell_state, random_pure_vector

BellIndex = tuple[int, int]

# Named selections of the two qubit Bell states superposed by
# riccardi_witness, as (m, n) labels of bell_state.  "default" is the
# pair whose partial-transposed projector expands over diagonally
# correlated Pauli operators as
#   (1/4) [I.I + Z.Z + (a^2-b^2)(X.X + Y.Y) + 2ab (Z.I + I.Z)].
BELL_PAIRS: dict[str, tuple[BellIndex, BellIndex]] = {
    "default": ((0, 0), (1, 0)),
    "phi": ((0, 0), (1, 0)),
    "psi": ((0, 1), (1, 1)),
    "phi-psi": ((0, 0), (0, 1)),
}


@dataclass(frozen=True)
class Witness:
    """Hermitian bipartite observable with a human-readable label."""

    matrix: np.ndarray
    dims: SubsystemDims
    label: str = "witness"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def witness(matrix, dims: SubsystemDims, label: str = "witness", tol: float = DEFAULT_TOL) -> Witness:
    """Validate hermiticity and freeze a Witness."""
    m = as_matrix(matrix)
    dims = SubsystemDims(*dims)
    if m.shape[0] != dims.total:
        raise ValueError(f"matrix dimension {m.shape[0]} != product of dims {tuple(dims)}")
    if not is_hermitian(m, tol):
        raise ValueError("witness must be Hermitian")
    return Witness(readonly(m), dims, label)


def resolve_bell_pair(pair) -> tuple[BellIndex, BellIndex]:
    """Accept a named pair from BELL_PAIRS or an explicit ((m,n),(m,n))."""
    if isinstance(pair, str):
        try:
            return BELL_PAIRS[pair]
        except KeyError:
            raise ValueError(f"unknown Bell pair {pair!r}; known: {sorted(BELL_PAIRS)}") from None
    (m1, n1), (m2, n2) = pair
    return (int(m1), int(n1)), (int(m2), int(n2))


def riccardi_witness(a: float, b: float, pair="default", tol: float = DEFAULT_TOL) -> Witness:
    """Partial transpose of |phi><phi| with |phi> = a|phi1> + b|phi2>, the
    two qubit Bell states selected by ``pair``.

    Requires a^2 + b^2 = 1.  Measurable with diagonally correlated Pauli
    settings only.  Note the a = b point of the default pair degenerates
    to a positive product projector (|phi> becomes a product state) and
    detects nothing; strict witnesses need a != b there.
    """
    if abs(a * a + b * b - 1.0) > tol:
        raise ValueError(f"(a, b) must be normalized, got a^2+b^2 = {a * a + b * b}")
    (m1, n1), (m2, n2) = resolve_bell_pair(pair)
    phi = a * bell_state(m1, n1, 2) + b * bell_state(m2, n2, 2)
    mat = partial_transpose(np.outer(phi, phi.conj()), SubsystemDims(2, 2), which="second")
    label = f"riccardi(a={a:g},b={b:g},pair=({m1}{n1},{m2}{n2}))"
    return witness(mat, SubsystemDims(2, 2), label, tol)


@dataclass(frozen=True)
class WitnessValidation:
    """Outcome of validate_witness."""

    min_product_value: float
    has_negative_eigenvalue: bool
    min_eigenvalue: float


def _best_product_value(w: np.ndarray, dims: SubsystemDims, vb: np.ndarray, iters: int = 60) -> float:
    """Alternating local-eigenvector descent from a starting B-side vector.

    Fixing one side reduces <a,b|W|a,b> to a local quadratic form whose
    minimizer is the lowest eigenvector; alternating sides descends
    monotonically.
    """
    da, db = dims
    w4 = w.reshape(da, db, da, db)
    value = np.inf
    va = None
    for _ in range(iters):
        ma = np.einsum("q,iqjp,p->ij", vb.conj(), w4, vb)
        evals, vecs = np.linalg.eigh(ma)
        va = vecs[:, 0]
        mb = np.einsum("i,iqjp,j->qp", va.conj(), w4, va)
        evals, vecs = np.linalg.eigh(mb)
        vb = vecs[:, 0]
        new_value = float(evals[0])
        if abs(new_value - value) < 1e-14:
            value = new_value
            break
        value = new_value
    return value


def validate_witness(w: Witness, samples: int = 200, seed: int = 0, tol: float = DEFAULT_TOL) -> WitnessValidation:
    """Estimate the minimum of <a,b|W|a,b> over product states (random
    starts refined by alternating descent) and check the spectrum for a
    negative eigenvalue.

    A valid strict witness reports min_product_value >= -tol together
    with has_negative_eigenvalue True.
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(samples):
        vb = random_pure_vector(w.dims.dim_b, rng)
        best = min(best, _best_product_value(w.matrix, w.dims, vb))
    min_eig = float(np.linalg.eigvalsh(w.matrix).min())
    return WitnessValidation(best, min_eig < -tol, min_eig)
