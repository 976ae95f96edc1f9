"""Compact textual parameterizations and matrix files.

State and witness specs are single tokens (no spaces) usable on the wire
and on the command line:

    state:    werner:P | random:SEED:RANK | file:PATH
    witness:  riccardi:A:B:PAIR | file:PATH

Matrix files share the line-record idiom of transcripts: a header line of
``field=value`` pairs, then one line per matrix row whose entries are
``re,im`` pairs separated by single spaces.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .linalg import SubsystemDims
from .states import DensityMatrix, density_matrix, random_density, werner_state
from .witnesses import Witness, riccardi_witness, witness

MATRIX_HEADER = "matrix-version=1"


def matrix_to_lines(m: np.ndarray, kind: str, dims: SubsystemDims | None, label: str | None = None) -> list[str]:
    fields = [MATRIX_HEADER, f"kind={kind}"]
    if dims is not None:
        fields += [f"dim_a={dims.dim_a}", f"dim_b={dims.dim_b}"]
    if label is not None:
        fields.append(f"label={label}")
    lines = [" ".join(fields)]
    for row in np.asarray(m, dtype=complex):
        lines.append(" ".join(f"{v.real!r},{v.imag!r}" for v in row))
    return lines


def matrix_from_lines(lines: list[str]) -> tuple[np.ndarray, str, SubsystemDims | None, str | None]:
    if not lines:
        raise ValueError("empty matrix record")
    header = lines[0].split()
    if not header or header[0] != MATRIX_HEADER:
        raise ValueError(f"bad matrix header: {lines[0]!r}")
    fields = {}
    for token in header[1:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise ValueError(f"malformed header field {token!r}")
        fields[key] = value
    kind = fields.get("kind")
    if kind not in ("state", "witness"):
        raise ValueError(f"unknown matrix kind {kind!r}")
    dims = None
    if "dim_a" in fields or "dim_b" in fields:
        try:
            dims = SubsystemDims(int(fields["dim_a"]), int(fields["dim_b"]))
        except (KeyError, ValueError):
            raise ValueError("dim_a/dim_b header fields must both be integers") from None
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        entries = []
        for token in line.split():
            re_s, sep, im_s = token.partition(",")
            if not sep:
                raise ValueError(f"line {lineno}: entry {token!r} is not 're,im'")
            entries.append(complex(float(re_s), float(im_s)))
        rows.append(entries)
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix rows form shape {m.shape}, expected square")
    return m, kind, dims, fields.get("label")


def write_matrix_file(path, m: np.ndarray, kind: str, dims: SubsystemDims | None, label: str | None = None) -> None:
    Path(path).write_text("\n".join(matrix_to_lines(m, kind, dims, label)) + "\n", encoding="utf-8")


def read_matrix_file(path) -> tuple[np.ndarray, str, SubsystemDims | None, str | None]:
    return matrix_from_lines(Path(path).read_text(encoding="utf-8").splitlines())


def parse_state_spec(spec: str, d: int, tol: float = 1e-10) -> DensityMatrix:
    """Build the state named by a spec token; its first subsystem must
    have dimension d."""
    head, _, rest = spec.partition(":")
    if head == "werner":
        if d != 2:
            raise ValueError("werner states are two-qubit; use --d 2")
        return werner_state(float(rest))
    if head == "random":
        try:
            seed_s, rank_s = rest.split(":")
        except ValueError:
            raise ValueError(f"random state spec must be random:SEED:RANK, got {spec!r}") from None
        dims = SubsystemDims(d, d)
        return random_density(d * d, int(rank_s), int(seed_s), dims)
    if head == "file":
        m, kind, dims, _ = read_matrix_file(rest)
        if kind != "state":
            raise ValueError(f"{rest}: expected a state file, found kind={kind}")
        dm = density_matrix(m, dims, tol)
        if (dm.dims.dim_a if dm.dims else dm.dim) != d:
            raise ValueError(f"{rest}: first-subsystem dimension does not match d={d}")
        return dm
    raise ValueError(f"unknown state spec {spec!r}")


def parse_witness_spec(spec: str, d: int, tol: float = 1e-10) -> Witness:
    """Build the witness named by a spec token for local dimension d."""
    head, _, rest = spec.partition(":")
    if head == "riccardi":
        if d != 2:
            raise ValueError("riccardi witnesses are two-qubit; use --d 2")
        try:
            a_s, b_s, pair = rest.split(":")
        except ValueError:
            raise ValueError(f"riccardi spec must be riccardi:A:B:PAIR, got {spec!r}") from None
        return riccardi_witness(float(a_s), float(b_s), pair, tol)
    if head == "file":
        m, kind, dims, label = read_matrix_file(rest)
        if kind != "witness":
            raise ValueError(f"{rest}: expected a witness file, found kind={kind}")
        if dims is None:
            raise ValueError(f"{rest}: witness files need dim_a/dim_b")
        if dims.dim_a != d:
            raise ValueError(f"{rest}: first-subsystem dimension does not match d={d}")
        return witness(m, dims, label or "file-witness", tol)
    raise ValueError(f"unknown witness spec {spec!r}")
