"""Spin-j operators, rotations, the two-particle singlet, and the
spin-zero projective measurement.

Basis convention: the magnetic quantum number m in {-j, ..., j} is mapped
to the computational index k = m + j, so matrices are written in the
ordered basis {|0>, ..., |d-1>} with d = 2j + 1 and k increasing with m.

The canonical singlet carries amplitudes (-1)^k rather than (-1)^m: for
half-integer m the latter is an ambiguous +-i, and the two choices differ
only by a global phase.  With this fixed convention the singlet is real
and strictly rotation invariant, with no residual phase freedom (the
spin-zero component transforms trivially).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .linalg import DEFAULT_TOL, dagger, expm_hermitian, kron, readonly


def spin_of_dim(d: int) -> float:
    """Spin j = (d - 1) / 2 of a d-dimensional particle."""
    d = int(d)
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return (d - 1) / 2.0


def dim_of_spin(j: float) -> int:
    """Local dimension d = 2j + 1; j must be a positive half-integer."""
    two_j = 2.0 * j
    if abs(two_j - round(two_j)) > 1e-12 or round(two_j) < 1:
        raise ValueError(f"spin must be a positive half-integer, got {j}")
    return int(round(two_j)) + 1


@lru_cache(maxsize=None)
def _ops_cached(d: int) -> dict[str, np.ndarray]:
    j = spin_of_dim(d)
    m = np.arange(d) - j
    jz = np.diag(m).astype(complex)
    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)), placed one below the diagonal
    # in k-order (k = m + j increases with m).
    raising = np.zeros((d, d), dtype=complex)
    for k in range(d - 1):
        mm = m[k]
        raising[k + 1, k] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    lowering = dagger(raising)
    jx = (raising + lowering) / 2.0
    jy = (raising - lowering) / 2.0j
    ops = {"jz": jz, "jplus": raising, "jminus": lowering, "jx": jx, "jy": jy}
    return {name: readonly(op) for name, op in ops.items()}


def angular_momentum_ops(d: int) -> dict[str, np.ndarray]:
    """Spin-j operators {jz, jplus, jminus, jx, jy} for local dimension d.

    Cached per dimension; the returned arrays are read-only.
    """
    return dict(_ops_cached(int(d)))


def total_angular_momentum_ops(d: int) -> dict[str, np.ndarray]:
    """Two-particle total operators J ⊗ I + I ⊗ J, same keys as
    :func:`angular_momentum_ops`."""
    single = angular_momentum_ops(d)
    eye = np.eye(d)
    return {name: kron(op, eye) + kron(eye, op) for name, op in single.items()}


def rotation_matrix(d: int, axis, angle: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Spin-j rotation exp(-i * angle * axis . J) for a unit 3-vector axis."""
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > tol:
        raise ValueError("axis must be a unit 3-vector")
    ops = angular_momentum_ops(d)
    generator = axis[0] * ops["jx"] + axis[1] * ops["jy"] + axis[2] * ops["jz"]
    return expm_hermitian(generator, -1j * angle, tol)


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Rotation about a uniformly random axis by an angle in [0, 4*pi)."""
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    return rotation_matrix(d, axis, rng.uniform(0.0, 4.0 * np.pi))


def singlet_state(d: int) -> np.ndarray:
    """The zero-total-angular-momentum state of two spin-j particles,
    (1/sqrt(d)) * sum_k (-1)^k |k, d-1-k>."""
    d = int(d)
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    psi = np.zeros(d * d, dtype=complex)
    for k in range(d):
        psi[k * d + (d - 1 - k)] = (-1.0) ** k
    return psi / np.sqrt(d)


def spin_projectors(d: int) -> tuple[np.ndarray, np.ndarray]:
    """(pi0, pi1): the rank-1 projector onto the two-particle spin-zero
    sector and its complement."""
    psi = singlet_state(d)
    pi0 = np.outer(psi, psi.conj())
    pi1 = np.eye(d * d, dtype=complex) - pi0
    return pi0, pi1
