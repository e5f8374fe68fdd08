"""Curious-tallyman measurements and their detection probabilities.

A general post-tally measurement on the weight-``s`` subspace couples the
ballots to an apparatus.  It is described by an array ``states`` of shape
``(d_s, d_s, D)`` whose entry ``[p, q]`` is the (unnormalized) apparatus
vector attached to basis string ``q`` when the input was basis string ``p``
(both 0-based here; the public ``pi`` labels are 1-based).  Tracing the
apparatus out gives a Kraus channel with one operator per apparatus
dimension.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .ballots import enumerate_weight_class, swap_pairing
from .errors import InvalidArgument, ResourceLimit
from .protocol import Event, ballot_test, encode_event, enumerate_events, pvm_projector
from .qstate import (PRUNE_TOL, Ensemble, KrausChannel,
                     apply_channel, computational_projectors)

ISOMETRY_TOL = 1e-9
DETECTION_TOL = 1e-9
IDENTITY_TOL = 1e-9
EXACT_TOL = 1e-12
MAX_SCAN_VOTERS = 6
MAX_THEOREM_VOTERS = 5


@dataclass(frozen=True, eq=False)
class ApparatusSpec:
    n: int
    s: int
    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=complex)
        d = len(enumerate_weight_class(self.n, self.s))
        if states.ndim != 3 or states.shape[:2] != (d, d) or states.shape[2] < 1:
            raise InvalidArgument(
                f"apparatus array must have shape ({d}, {d}, D) for n={self.n}, s={self.s}; "
                f"got {states.shape}")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def d(self) -> int:
        return self.states.shape[0]

    @property
    def D(self) -> int:  # noqa: N802
        return self.states.shape[2]

    def gram(self) -> np.ndarray:
        """``G[p, r] = sum_q <a_pq | a_rq>``."""
        return np.einsum("pqx,rqx->pr", self.states.conj(), self.states)

    @classmethod
    def identity(cls, n: int, s: int, dim: Optional[int] = None) -> "ApparatusSpec":
        d = len(enumerate_weight_class(n, s))
        states = np.zeros((d, d, dim or d), dtype=complex)
        states[np.arange(d), np.arange(d), 0] = 1
        return cls(n, s, states)


class IsometryCheck(NamedTuple):
    ok: bool
    deviation: float


def validate_isometry(spec: ApparatusSpec) -> IsometryCheck:
    dev = float(np.max(np.abs(spec.gram() - np.eye(spec.d))))
    return IsometryCheck(dev <= ISOMETRY_TOL, dev)


@dataclass(frozen=True, eq=False)
class AttackChannel:
    """Kraus channel on the full register.

    ``s`` is the weight class the attack is built for, or ``None`` for an
    attack that preserves every weight class and so applies to any tally.
    """

    n: int
    channel: KrausChannel
    s: Optional[int] = None
    label: str = ""

    @property
    def kraus_ops(self):
        return self.channel.kraus_ops


def identity_attack(n: int, s: Optional[int] = None) -> AttackChannel:
    return AttackChannel(n, KrausChannel.identity(2 ** n), s, "none")


def apparatus_to_channel(spec: ApparatusSpec, label: str = "apparatus") -> AttackChannel:
    """``K_x = sum a_pq[x] |m_q><m_p|`` on the subspace, identity off it.

    The complement identity rides on the first Kraus operator; operators
    that vanish identically are dropped.
    """
    check = validate_isometry(spec)
    if not check.ok:
        raise InvalidArgument(f"apparatus states violate the isometry condition "
                              f"(deviation {check.deviation:.3g})")
    n, dim = spec.n, 2 ** spec.n
    idx = np.array(enumerate_weight_class(n, spec.s).indices)
    ops = []
    for x in range(spec.D):
        k = np.zeros((dim, dim), dtype=complex)
        # rows: output string q, columns: input string p
        k[np.ix_(idx, idx)] = spec.states[:, :, x].T
        if x == 0:
            k += np.eye(dim) - pvm_projector(n, spec.s)
        if np.max(np.abs(k)) > PRUNE_TOL:
            ops.append(k)
    return AttackChannel(n, KrausChannel(dim, tuple(ops)), spec.s, label)


def single_qubit_attack(i: int, n: int) -> AttackChannel:
    """Computational-basis measurement of voter ``i``'s ballot."""
    if not 1 <= i <= n:
        raise InvalidArgument(f"voter {i} outside 1..{n}")
    return AttackChannel(n, KrausChannel(2 ** n, tuple(computational_projectors(i, n))),
                         None, f"single-qubit({i})")


def diagonal_phase_attack(s: int, n: int, phases, dim: Optional[int] = None) -> ApparatusSpec:
    """Apparatus that only imprints the phase ``phases[p]`` on string ``p``."""
    phases = np.asarray(phases, dtype=float).reshape(-1)
    d = len(enumerate_weight_class(n, s))
    if phases.size != d:
        raise InvalidArgument(f"need {d} phases for n={n}, s={s}, got {phases.size}")
    states = np.zeros((d, d, dim or d), dtype=complex)
    states[np.arange(d), np.arange(d), 0] = np.exp(1j * phases)
    return ApparatusSpec(n, s, states)


def random_apparatus(n: int, s: int, rng: np.random.Generator,
                     dim: Optional[int] = None) -> ApparatusSpec:
    """Haar-random isometry from the subspace into subspace ⊗ apparatus.

    Complex Gaussian ``(d*D) x d`` matrix, QR with the phases of ``R``'s
    diagonal folded back into ``Q``.
    """
    d = len(enumerate_weight_class(n, s))
    D = dim or d
    z = (rng.standard_normal((d * D, d)) + 1j * rng.standard_normal((d * D, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    # column p is the image of |m_p>, row (q', x) its component on |m_q'>|x>
    states = q.T.reshape(d, d, D)
    return ApparatusSpec(n, s, states)


def is_identity_up_to_phase(spec: ApparatusSpec, tol: float = IDENTITY_TOL) -> bool:
    """True if no information is extracted: ``a_pq = delta_pq * a_00``."""
    a = spec.states
    off = a.copy()
    off[np.arange(spec.d), np.arange(spec.d)] = 0
    if np.max(np.abs(off)) > tol:
        return False
    diag = a[np.arange(spec.d), np.arange(spec.d)]
    return bool(np.max(np.abs(diag - diag[0])) <= tol)


def _check_compatible(event: Event, attack: AttackChannel):
    if attack.n != event.n:
        raise InvalidArgument(f"attack acts on {attack.n} qubits, event has {event.n} voters")
    if attack.s is not None and attack.s != event.s_expected:
        raise InvalidArgument(
            f"attack is built for tally s={attack.s}, but the event announces s={event.s_expected}")


def detection_probability(event: Event, attack: AttackChannel) -> float:
    """Exact probability that the ballot test fails after the attack."""
    _check_compatible(event, attack)
    returned = apply_channel(Ensemble.pure(encode_event(event)), attack.channel)
    report = ballot_test(event, returned)
    return min(max(1.0 - report.pass_probability, 0.0), 1.0)


class DetectionReport(NamedTuple):
    per_event: tuple  # ((Event, failure_probability), ...)
    max_event: Event
    max_probability: float


def max_detection(attack: AttackChannel, n: int, s: int) -> DetectionReport:
    """Detection probability of every event announcing ``s``; first maximum wins."""
    if n > MAX_SCAN_VOTERS:
        raise ResourceLimit(f"exhaustive scans are capped at {MAX_SCAN_VOTERS} voters")
    rows = tuple((e, detection_probability(e, attack)) for e in enumerate_events(n, s))
    if not rows:
        raise InvalidArgument(f"no events with n={n}, s={s}")
    best = rows[0]
    for row in rows[1:]:
        if row[1] > best[1]:
            best = row
    return DetectionReport(rows, best[0], best[1])


def witness_event(spec: ApparatusSpec) -> Optional[Event]:
    """Event that the constructive argument says must catch ``spec``.

    A nonzero off-diagonal ``a_pq`` is caught by everybody voting according
    to string ``p``.  Otherwise two unequal diagonal vectors ``a_pp`` and
    ``a_qq`` are caught by letting the swap pairing between strings ``p``
    and ``q`` check, with everybody else voting their common bits.  Returns
    ``None`` when the spec extracts no information.
    """
    wc = enumerate_weight_class(spec.n, spec.s)
    a = spec.states
    d = spec.d
    norms = np.linalg.norm(a, axis=2)
    for p in range(d):
        for q in range(d):
            if p != q and norms[p, q] > IDENTITY_TOL:
                return Event.from_bits(wc.strings[p])
    for p in range(d):
        for q in range(p + 1, d):
            if np.linalg.norm(a[p, p] - a[q, q]) > IDENTITY_TOL:
                return pairing_event(wc.strings[p], wc.strings[q])
    return None


def pairing_event(m: str, m_prime: str) -> Event:
    """Pairs from the swap pairing check; the other voters vote their shared bits."""
    n = len(m)
    pairs = tuple(swap_pairing(m, m_prime))
    paired = {x for pair in pairs for x in pair}
    votes = {i: int(m[n - i]) for i in range(1, n + 1) if i not in paired}
    return Event.from_parts(n, votes, pairs)


class TheoremCheckResult(NamedTuple):
    n: int
    s: int
    trials: int
    skipped: int
    failures: int
    min_detection: float
    identity_max: float

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.identity_max < EXACT_TOL


def theorem_check(n: int, s: int, trials: int = 100, seed: int = 0,
                  dim: Optional[int] = None) -> TheoremCheckResult:
    """Sample random apparatus specs and confirm each one is detectable.

    Trial ``t`` draws from ``default_rng(seed + t)``.  Specs that are the
    identity up to a global phase are skipped; every other spec must reach a
    maximum detection probability above ``DETECTION_TOL``.  The identity
    spec itself must stay below ``EXACT_TOL``.
    """
    if n > MAX_THEOREM_VOTERS:
        raise ResourceLimit(f"theorem checks are capped at {MAX_THEOREM_VOTERS} voters")
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    skipped = failures = 0
    lowest = np.inf
    for t in range(trials):
        spec = random_apparatus(n, s, np.random.default_rng(seed + t), dim)
        if is_identity_up_to_phase(spec):
            skipped += 1
            continue
        best = max_detection(apparatus_to_channel(spec), n, s).max_probability
        lowest = min(lowest, best)
        if best <= DETECTION_TOL:
            failures += 1
    ident = apparatus_to_channel(ApparatusSpec.identity(n, s, dim))
    identity_max = max_detection(ident, n, s).max_probability
    return TheoremCheckResult(n, s, trials, skipped, failures, float(lowest), identity_max)
