"""Shot-level simulation: sample Alice's branch, sample Bob's eigenvalue,
aggregate a witness-value estimate with uncertainty.

RNG contract
------------
All shot randomness derives from a single integer seed through a fixed,
splittable layout.  Shots are numbered from 0 and grouped into chunks of
``CHUNK`` consecutive shots; chunk c is generated by
``default_rng(SeedSequence(entropy=seed, spawn_key=(c,)))`` as a
(CHUNK, 2) uniform array drawn in one call.  Shot i reads row
``i % CHUNK`` of chunk ``i // CHUNK``: column 0 decides the branch
(branch 0 iff u < p0), column 1 selects Bob's eigenvalue by inverse CDF
over the branch observable's spectral weights.

Because the layout is positional, any partition of shots across batches,
threads, or protocol rounds reproduces identical outcomes: the bulk
estimator and the round-by-round session layer consume the very same
numbers.

Eigenvalues closer than ``CLUSTER_TOL`` are merged into one spectral
projector before sampling so that degenerate observables cannot produce
negative rounding weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, as_matrix, is_hermitian
from .protocol import closed_form_branches, transform_witness
from .states import DensityMatrix
from .witnesses import Witness

CHUNK = 1 << 16
CLUSTER_TOL = 1e-8


class UniformStream:
    """Positional access to the per-shot uniform pairs of one seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._cache: dict[int, np.ndarray] = {}

    def _chunk(self, c: int) -> np.ndarray:
        got = self._cache.get(c)
        if got is None:
            rng = np.random.default_rng(np.random.SeedSequence(entropy=self.seed, spawn_key=(c,)))
            got = rng.random((CHUNK, 2))
            self._cache.clear()  # rounds advance monotonically; keep one chunk
            self._cache[c] = got
        return got

    def rows(self, start: int, stop: int) -> np.ndarray:
        """Uniform pairs for shots [start, stop) as a (stop-start, 2) array."""
        if not 0 <= start <= stop:
            raise ValueError(f"bad shot range [{start}, {stop})")
        parts = []
        i = start
        while i < stop:
            c, offset = divmod(i, CHUNK)
            take = min(CHUNK - offset, stop - i)
            parts.append(self._chunk(c)[offset : offset + take])
            i += take
        if not parts:
            return np.empty((0, 2))
        return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class ShotRecord:
    """One protocol round: Alice's branch bit and Bob's sampled eigenvalue."""

    branch: int
    eigenvalue: float
    round: int


@dataclass(frozen=True)
class Estimate:
    """Shot-average estimate of Tr(W rho) with its standard error."""

    mean: float
    stderr: float
    shots: int
    seed: int


class SpectralSampler:
    """Inverse-CDF sampler over the spectral measure of a Hermitian
    observable in a given state."""

    def __init__(self, observable: np.ndarray, state: np.ndarray, tol: float = DEFAULT_TOL):
        obs = as_matrix(observable)
        if not is_hermitian(obs, max(tol, 1e-8)):
            raise ValueError("observable must be Hermitian")
        evals, vecs = np.linalg.eigh(obs)
        raw = np.einsum("ik,ij,jk->k", vecs.conj(), as_matrix(state), vecs).real

        values, weights = [], []
        k = 0
        while k < len(evals):
            stop = k + 1
            while stop < len(evals) and evals[stop] - evals[stop - 1] <= CLUSTER_TOL:
                stop += 1
            values.append(float(np.mean(evals[k:stop])))
            weights.append(float(np.sum(raw[k:stop])))
            k = stop
        w = np.clip(np.asarray(weights), 0.0, None)
        total = w.sum()
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"spectral weights sum to {total}, not 1")
        self.values = np.asarray(values)
        self.probabilities = w / total
        self._cdf = np.cumsum(self.probabilities)

    def lookup(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in [0, 1) to sampled eigenvalues."""
        idx = np.searchsorted(self._cdf, u, side="right")
        return self.values[np.minimum(idx, len(self.values) - 1)]

    @property
    def mean(self) -> float:
        return float(self.values @ self.probabilities)


def sample_branch(p0: float, rng: np.random.Generator) -> int:
    """Bernoulli branch draw: 0 with probability p0."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must lie in [0, 1], got {p0}")
    return 0 if rng.random() < p0 else 1


def sample_eigen_outcome(rho: DensityMatrix, observable: np.ndarray, rng: np.random.Generator) -> float:
    """Born-rule draw of one eigenvalue of the observable in state rho."""
    sampler = SpectralSampler(observable, rho.matrix)
    return float(sampler.lookup(np.array([rng.random()]))[0])


@dataclass(frozen=True)
class ShotBatch:
    """Vectorized shot results plus the branch machinery that made them."""

    branches: np.ndarray
    eigenvalues: np.ndarray
    p0: float
    seed: int

    @property
    def shots(self) -> int:
        return len(self.branches)

    def records(self):
        for i, (b, v) in enumerate(zip(self.branches, self.eigenvalues)):
            yield ShotRecord(int(b), float(v), i)

    def branch_estimates(self) -> tuple[Estimate, Estimate]:
        """Per-branch conditional estimates (each unbiased for Tr(W rho))."""
        out = []
        for b in (0, 1):
            vals = self.eigenvalues[self.branches == b]
            out.append(estimate_from_outcomes(vals, self.seed))
        return tuple(out)


class ProtocolSampler:
    """Precomputed per-branch spectral samplers for one (state, witness)
    experiment; the shot maps used by both bulk and session paths."""

    def __init__(self, rho: DensityMatrix, w: Witness, d: int):
        b0, b1 = closed_form_branches(rho, d)
        pair = transform_witness(w, d)
        self.p0 = b0.probability
        self.samplers = (
            SpectralSampler(pair.w0.matrix, b0.state.matrix),
            SpectralSampler(pair.w1.matrix, b1.state.matrix),
        )
        self.analytic = float(np.trace(w.matrix @ rho.matrix).real)

    def branch_of(self, u: np.ndarray) -> np.ndarray:
        return (u >= self.p0).astype(np.int64)

    def outcome_of(self, branch: np.ndarray, u: np.ndarray) -> np.ndarray:
        out = np.where(
            branch == 0,
            self.samplers[0].lookup(u),
            self.samplers[1].lookup(u),
        )
        return out


def simulate_shots(rho: DensityMatrix, w: Witness, d: int, shots: int, seed: int) -> ShotBatch:
    """Run the shot loop vectorized over the documented uniform layout."""
    if shots < 0:
        raise ValueError(f"shots must be nonnegative, got {shots}")
    sampler = ProtocolSampler(rho, w, d)
    u = UniformStream(seed).rows(0, shots)
    branches = sampler.branch_of(u[:, 0])
    eigenvalues = sampler.outcome_of(branches, u[:, 1])
    return ShotBatch(branches, eigenvalues, sampler.p0, seed)


def estimate_from_outcomes(outcomes: np.ndarray, seed: int) -> Estimate:
    """Mean and standard error (sample std / sqrt(n)) of recorded
    eigenvalues; stderr is 0 when fewer than two shots exist."""
    outcomes = np.asarray(outcomes, dtype=float)
    n = len(outcomes)
    if n == 0:
        return Estimate(float("nan"), float("nan"), 0, seed)
    mean = float(np.mean(outcomes))
    stderr = float(np.std(outcomes, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return Estimate(mean, stderr, n, seed)


def estimate_witness_value(rho: DensityMatrix, w: Witness, d: int, shots: int, seed: int) -> Estimate:
    """Shot-average estimate of Tr(W rho) through the protocol: per shot,
    draw Alice's branch, then an eigenvalue of that branch's observable.

    Both branches are unbiased for Tr(W rho), so all shots pool into one
    mean.  Deterministic in (seed, shots) regardless of batch layout.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    batch = simulate_shots(rho, w, d, shots, seed)
    return estimate_from_outcomes(batch.eigenvalues, seed)
