"""Dense complex-matrix primitives shared by every other module.

Conventions
-----------
- Operators are dense ``complex128`` numpy arrays; protocol dimensions are
  tiny (local dimension below ~10), so no sparse or structured storage.
- Composite systems put the first subsystem on the slow index: the joint
  basis state |a, b> lives at row ``a * dim_b + b``, so ``kron(A, B)``
  places ``A`` on the first subsystem.
- Predicates (hermiticity, unitarity, positivity) take an explicit
  tolerance, defaulting to ``DEFAULT_TOL``.
- Matrix exponentials of Hermitian generators go through the Hermitian
  eigensolver, which keeps ``exp(-i t H)`` unitary to solver precision.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_TOL = 1e-10


class SubsystemDims(NamedTuple):
    """Local dimensions of a bipartite operator, first subsystem first."""

    dim_a: int
    dim_b: int

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex128 array."""
    out = np.asarray(m, dtype=complex)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {out.shape}")
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and np.abs(m - dagger(m)).max() <= tol


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return np.abs(dagger(m) @ m - np.eye(m.shape[0])).max() <= tol


def is_positive_semidefinite(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        return False
    return float(np.linalg.eigvalsh(m).min()) >= -tol


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first argument becomes the first subsystem."""
    return np.kron(as_matrix(a), as_matrix(b))


def _check_bipartite(m: np.ndarray, dims: SubsystemDims) -> np.ndarray:
    m = as_matrix(m)
    total = dims.dim_a * dims.dim_b
    if m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match dims {tuple(dims)}")
    return m


def partial_trace(m: np.ndarray, dims: SubsystemDims, which: str = "first") -> np.ndarray:
    """Trace out one subsystem of a bipartite operator.

    ``which`` names the subsystem removed; the full trace is preserved.
    """
    dims = SubsystemDims(*dims)
    m = _check_bipartite(m, dims)
    t = m.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    if which == "first":
        return np.trace(t, axis1=0, axis2=2)
    if which == "second":
        return np.trace(t, axis1=1, axis2=3)
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


def partial_transpose(m: np.ndarray, dims: SubsystemDims, which: str = "second") -> np.ndarray:
    """Transpose the indices of one subsystem only (involutive, trace- and
    hermiticity-preserving)."""
    dims = SubsystemDims(*dims)
    m = _check_bipartite(m, dims)
    t = m.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    if which == "first":
        t = t.transpose(2, 1, 0, 3)
    elif which == "second":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    return t.reshape(dims.total, dims.total)


def permute_subsystems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a multipartite operator.

    ``perm[k]`` is the old position of the subsystem that ends up at new
    position ``k``; ``dims`` are the old local dimensions in order.
    """
    dims = tuple(int(d) for d in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"perm {perm} is not a permutation of {len(dims)} subsystems")
    total = int(np.prod(dims))
    m = as_matrix(m)
    if m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    n = len(dims)
    t = m.reshape(dims + dims)
    axes = perm + tuple(p + n for p in perm)
    return t.transpose(axes).reshape(total, total)


def expm_hermitian(h: np.ndarray, scale: complex = 1.0, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrix exponential ``exp(scale * h)`` of a Hermitian ``h`` via
    eigendecomposition; unitary whenever ``scale`` is purely imaginary."""
    h = as_matrix(h)
    if not is_hermitian(h, tol):
        raise ValueError("expm_hermitian requires a Hermitian input")
    evals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(scale * evals)) @ dagger(vecs)


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt(sum |a_ij - b_ij|^2); zero iff the matrices are equal."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def readonly(m: np.ndarray) -> np.ndarray:
    """Return a C-contiguous copy flagged read-only (safe to share)."""
    out = np.array(m, dtype=complex, order="C")
    out.setflags(write=False)
    return out
