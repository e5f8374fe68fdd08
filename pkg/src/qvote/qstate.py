"""Dense pure-state simulation of small qubit registers.

Qubit ``i`` (1-based) is bit position ``i`` of the basis index counted from
the right, so the basis state written as the string ``"00010"`` has qubit 2
in ``|1>`` and amplitude 1 at index 2.  Mixed states are carried as
ensembles of pure branches rather than density matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidArgument

MAX_QUBITS = 12
NORM_TOL = 1e-10
PRUNE_TOL = 1e-12
COMPLETENESS_TOL = 1e-9

_S = 1 / np.sqrt(2)

# Local two-qubit vectors, local index = 2 * x_i + x_j.
BELL_VECTORS = {
    "phi+": np.array([_S, 0, 0, _S], dtype=complex),
    "phi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "psi+": np.array([0, _S, _S, 0], dtype=complex),
    "psi-": np.array([0, _S, -_S, 0], dtype=complex),
}
BELL_KINDS = tuple(BELL_VECTORS)

_KIND_ALIASES = {
    "Φ+": "phi+", "Φ-": "phi-", "Φ−": "phi-",
    "Ψ+": "psi+", "Ψ-": "psi-", "Ψ−": "psi-",
}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector of an ``n_qubits`` register."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidArgument(
                f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_qubits:
            raise InvalidArgument(
                f"expected {2 ** self.n_qubits} amplitudes, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1) > NORM_TOL:
            raise InvalidArgument(f"state is not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, n_qubits: int, vector) -> "StateVector":
        vector = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise InvalidArgument("cannot normalize the zero vector")
        return cls(n_qubits, vector / norm)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "StateVector") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2

    def allclose(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        return (self.n_qubits == other.n_qubits
                and np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0))

    def __repr__(self):
        nz = np.flatnonzero(np.abs(self.amplitudes) > PRUNE_TOL)
        terms = ", ".join(
            f"{format(int(i), f'0{self.n_qubits}b')}: {self.amplitudes[i]:.6g}" for i in nz[:8])
        more = ", ..." if nz.size > 8 else ""
        return f"StateVector(n={self.n_qubits}, {{{terms}{more}}})"


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving map given by its Kraus operators."""

    dim: int
    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise InvalidArgument("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.dim, self.dim):
                raise InvalidArgument(
                    f"Kraus operator of shape {k.shape} does not match dim {self.dim}")
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        dev = self.completeness_deviation()
        if dev > COMPLETENESS_TOL:
            raise InvalidArgument(f"Kraus operators are not trace preserving (deviation {dev:.3g})")

    def completeness_deviation(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    @classmethod
    def identity(cls, dim: int) -> "KrausChannel":
        return cls(dim, (np.eye(dim, dtype=complex),))


class Branch(NamedTuple):
    probability: float
    state: StateVector


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Classical mixture of pure states."""

    branches: tuple

    def __post_init__(self):
        branches = tuple(Branch(float(p), s) for p, s in self.branches)
        if not branches:
            raise InvalidArgument("an ensemble needs at least one branch")
        n = branches[0].state.n_qubits
        for p, s in branches:
            if not -NORM_TOL <= p <= 1 + NORM_TOL:
                raise InvalidArgument(f"branch probability {p!r} outside [0, 1]")
            if s.n_qubits != n:
                raise InvalidArgument("ensemble branches have different qubit counts")
        total = sum(p for p, _ in branches)
        if abs(total - 1) > NORM_TOL:
            raise InvalidArgument(f"branch probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def pure(cls, state: StateVector) -> "Ensemble":
        return cls(((1.0, state),))

    @property
    def n_qubits(self) -> int:
        return self.branches[0].state.n_qubits

    def __len__(self):
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    def expectation(self, operator: np.ndarray) -> float:
        return float(sum(
            p * np.vdot(s.amplitudes, operator @ s.amplitudes).real for p, s in self.branches))


class MeasurementOutcome(NamedTuple):
    index: int
    probability: float
    state: StateVector


def _check_n(n):
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidArgument(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")


def _check_qubits(qubits, n):
    for q in qubits:
        if not 1 <= q <= n:
            raise InvalidArgument(f"qubit index {q} outside 1..{n}")
    if len(set(qubits)) != len(qubits):
        raise InvalidArgument(f"repeated qubit index in {tuple(qubits)}")


def basis_state(n: int, bits: str) -> StateVector:
    """Computational basis state; the leftmost character is qubit ``n``."""
    _check_n(n)
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise InvalidArgument(f"expected a {n}-character bit string, got {bits!r}")
    amps = np.zeros(2 ** n, dtype=complex)
    amps[int(bits, 2)] = 1
    return StateVector(n, amps)


def bell_state(kind: str, i: int, j: int, n: int = 2) -> StateVector:
    """Bell state on qubits ``i`` and ``j`` with every other qubit in ``|0>``.

    ``kind`` is one of ``phi+``, ``phi-``, ``psi+``, ``psi-`` (the Greek
    spellings are accepted as well).  The first tensor factor is qubit ``i``:
    ``psi-`` is ``(|0>_i|1>_j - |1>_i|0>_j)/sqrt(2)``.
    """
    kind = _KIND_ALIASES.get(kind, kind).lower()
    if kind not in BELL_VECTORS:
        raise InvalidArgument(f"unknown Bell state {kind!r}")
    _check_n(n)
    if i == j:
        raise InvalidArgument("Bell state needs two distinct qubits")
    _check_qubits((i, j), n)
    local = BELL_VECTORS[kind]
    amps = np.zeros(2 ** n, dtype=complex)
    for x in (0, 1):
        for y in (0, 1):
            amps[(x << (i - 1)) | (y << (j - 1))] = local[2 * x + y]
    return StateVector(n, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """``a ⊗ b`` with ``b`` on the low (rightmost) qubit positions."""
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def apply_local(matrix: np.ndarray, qubits: Sequence[int], array: np.ndarray, n: int) -> np.ndarray:
    """Apply a ``2^m x 2^m`` matrix acting on ``qubits`` to a register array.

    ``array`` has leading dimension ``2^n``; any trailing dimensions are
    treated as a batch.  Local basis order puts ``qubits[0]`` in the most
    significant bit.
    """
    qubits = tuple(qubits)
    _check_qubits(qubits, n)
    m = len(qubits)
    matrix = np.asarray(matrix)
    if matrix.shape != (2 ** m, 2 ** m):
        raise InvalidArgument(f"local matrix shape {matrix.shape} does not fit {m} qubits")
    array = np.asarray(array)
    batch = array.shape[1:]
    axes = [n - q for q in qubits]
    t = np.moveaxis(array.reshape((2,) * n + batch), axes, range(m))
    rest = t.shape[m:]
    t = (matrix @ t.reshape(2 ** m, -1)).reshape((2,) * m + rest)
    return np.moveaxis(t, range(m), axes).reshape(array.shape)


def embed_operator(matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Dense ``2^n``-dimensional operator acting as ``matrix`` on ``qubits``."""
    _check_n(n)
    return apply_local(matrix, qubits, np.eye(2 ** n, dtype=complex), n)


def computational_projectors(i: int, n: int) -> list:
    """``[|0><0|_i, |1><1|_i]`` on the full register."""
    _check_n(n)
    _check_qubits((i,), n)
    bit = (np.arange(2 ** n) >> (i - 1)) & 1
    return [np.diag((bit == b).astype(complex)) for b in (0, 1)]


def bell_projectors(i: int, j: int, n: int) -> list:
    """Bell-basis PVM on qubits ``(i, j)`` in the order of ``BELL_KINDS``."""
    if i == j:
        raise InvalidArgument("Bell measurement needs two distinct qubits")
    return [embed_operator(np.outer(v, v.conj()), (i, j), n) for v in BELL_VECTORS.values()]


def _validate_pvm(projectors, dim):
    for a, p in enumerate(projectors):
        if p.shape != (dim, dim):
            raise InvalidArgument(f"projector {a} has shape {p.shape}, expected {(dim, dim)}")
        if (np.max(np.abs(p - p.conj().T)) > COMPLETENESS_TOL
                or np.max(np.abs(p @ p - p)) > COMPLETENESS_TOL):
            raise InvalidArgument(f"operator {a} is not an orthogonal projector")
    for a in range(len(projectors)):
        for b in range(a + 1, len(projectors)):
            if np.max(np.abs(projectors[a] @ projectors[b])) > COMPLETENESS_TOL:
                raise InvalidArgument(f"projectors {a} and {b} are not orthogonal")
    if np.max(np.abs(sum(projectors) - np.eye(dim))) > COMPLETENESS_TOL:
        raise InvalidArgument("projectors do not resolve the identity")


def measure_projectors(state: StateVector, projectors: Sequence[np.ndarray]) -> list:
    """Exact Born-rule distribution of a projective measurement.

    Returns one ``MeasurementOutcome`` per projector whose probability is at
    least ``PRUNE_TOL``, carrying the renormalized post-measurement state.
    """
    projectors = [np.asarray(p, dtype=complex) for p in projectors]
    if not projectors:
        raise InvalidArgument("empty projector list")
    _validate_pvm(projectors, state.dim)
    out = []
    for a, p in enumerate(projectors):
        v = p @ state.amplitudes
        prob = float(np.vdot(v, v).real)
        if prob >= PRUNE_TOL:
            out.append(MeasurementOutcome(a, prob, StateVector(state.n_qubits, v / np.sqrt(prob))))
    return out


def apply_channel(ensemble: Ensemble, channel: KrausChannel) -> Ensemble:
    """Split every branch into one branch per Kraus operator."""
    if channel.dim != 2 ** ensemble.n_qubits:
        raise InvalidArgument(
            f"channel dim {channel.dim} does not match {ensemble.n_qubits}-qubit states")
    n = ensemble.n_qubits
    branches = []
    for p, s in ensemble:
        for k in channel.kraus_ops:
            v = k @ s.amplitudes
            w = p * float(np.vdot(v, v).real)
            if w >= PRUNE_TOL:
                branches.append((w, v / np.linalg.norm(v)))
    total = sum(w for w, _ in branches)
    return Ensemble(tuple((w / total, StateVector(n, v)) for w, v in branches))
