"""Ballot encoding, the tallyman's yes-count measurement and the ballot test.

Voters are numbered ``1..n`` and voter ``i`` owns qubit ``i``.  Each voter
either votes a bit or checks anonymity together with a partner; a checking
pair shares a ``psi+`` Bell state.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, prod
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .qstate import (BELL_VECTORS, MAX_QUBITS, NORM_TOL, PRUNE_TOL, Ensemble,
                     KrausChannel, StateVector, apply_local)

MAX_ENUM_VOTERS = 8

_PSI_PLUS = BELL_VECTORS["psi+"]
_PSI_PLUS_PROJ = np.outer(_PSI_PLUS, _PSI_PLUS.conj())


@dataclass(frozen=True)
class Vote:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise InvalidArgument(f"vote must be 0 or 1, got {self.bit!r}")

    def token(self) -> str:
        return str(self.bit)


@dataclass(frozen=True)
class Check:
    partner: int

    def token(self) -> str:
        return f"C{self.partner}"


VoterAction = Union[Vote, Check]


def parse_action(token) -> VoterAction:
    """``0``/``1`` for a vote, ``C<j>`` for an anonymity check with voter j."""
    if isinstance(token, (Vote, Check)):
        return token
    if isinstance(token, bool):
        raise InvalidArgument(f"bad action {token!r}")
    if isinstance(token, int):
        return Vote(token)
    text = str(token).strip()
    if text in ("0", "1"):
        return Vote(int(text))
    if text[:1] in ("C", "c") and text[1:].isdigit():
        return Check(int(text[1:]))
    raise InvalidArgument(f"bad action {token!r}: expected 0, 1 or C<partner>")


@dataclass(frozen=True)
class Event:
    """Classical description of one protocol round."""

    n: int
    actions: tuple

    def __post_init__(self):
        actions = tuple(parse_action(a) for a in self.actions)
        if self.n < 1:
            raise InvalidArgument("an event needs at least one voter")
        if len(actions) != self.n:
            raise InvalidArgument(f"expected {self.n} actions, got {len(actions)}")
        for i, a in enumerate(actions, start=1):
            if isinstance(a, Check):
                j = a.partner
                if not 1 <= j <= self.n or j == i:
                    raise InvalidArgument(f"voter {i} checks with invalid partner {j}")
                back = actions[j - 1]
                if not (isinstance(back, Check) and back.partner == i):
                    raise InvalidArgument(f"voter {i} checks with {j}, but {j} does not check with {i}")
        object.__setattr__(self, "actions", actions)

    @classmethod
    def from_tokens(cls, tokens) -> "Event":
        if isinstance(tokens, str):
            tokens = tokens.split()
        tokens = list(tokens)
        return cls(len(tokens), tuple(tokens))

    @classmethod
    def from_bits(cls, bits: str) -> "Event":
        """Everybody votes; the rightmost character is voter 1's bit."""
        if not bits or set(bits) - {"0", "1"}:
            raise InvalidArgument(f"not a bit string: {bits!r}")
        return cls(len(bits), tuple(Vote(int(b)) for b in reversed(bits)))

    @classmethod
    def from_parts(cls, n: int, votes=None, pairs=()) -> "Event":
        """Build from ``{voter: bit}`` and a list of checking pairs."""
        actions = [None] * n
        for i, j in pairs:
            for a, b in ((i, j), (j, i)):
                if not 1 <= a <= n:
                    raise InvalidArgument(f"voter {a} outside 1..{n}")
                if actions[a - 1] is not None:
                    raise InvalidArgument(f"voter {a} appears in two pairs")
                actions[a - 1] = Check(b)
        for i, b in (votes or {}).items():
            if not 1 <= i <= n or actions[i - 1] is not None:
                raise InvalidArgument(f"voter {i} cannot vote here")
            actions[i - 1] = Vote(b)
        missing = [i + 1 for i, a in enumerate(actions) if a is None]
        if missing:
            raise InvalidArgument(f"no action for voters {missing}")
        return cls(n, tuple(actions))

    @property
    def pairs(self) -> tuple:
        """Checking pairs ``(i, j)`` with ``i < j``, sorted by ``i``."""
        return tuple((i, a.partner) for i, a in enumerate(self.actions, start=1)
                     if isinstance(a, Check) and i < a.partner)

    @property
    def votes(self) -> dict:
        return {i: a.bit for i, a in enumerate(self.actions, start=1) if isinstance(a, Vote)}

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def l(self) -> int:  # noqa: E743
        return sum(self.votes.values())

    @property
    def s_expected(self) -> int:
        return self.k + self.l

    @property
    def parties(self) -> tuple:
        """Independent testers in voter order: an int per voter, a tuple per pair."""
        out = []
        for i, a in enumerate(self.actions, start=1):
            if isinstance(a, Vote):
                out.append(i)
            elif i < a.partner:
                out.append((i, a.partner))
        return tuple(out)

    def tokens(self) -> tuple:
        return tuple(a.token() for a in self.actions)

    def __str__(self):
        return " ".join(self.tokens())


class TallyOutcome(NamedTuple):
    s: int
    probability: float
    post_state: StateVector


class BallotTestReport(NamedTuple):
    pass_probability: float
    per_party: tuple  # ((party, failure_probability), ...)

    @property
    def failure_probability(self) -> float:
        return 1.0 - self.pass_probability


@lru_cache(maxsize=None)
def hamming_weights(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    w = np.zeros(2 ** n, dtype=int)
    for p in range(n):
        w += (idx >> p) & 1
    w.setflags(write=False)
    return w


def _check_event(event):
    if event.n > MAX_QUBITS:
        raise ResourceLimit(f"{event.n} voters exceed the {MAX_QUBITS}-qubit cap")


def encode_event(event: Event) -> StateVector:
    """Ballot register of an event: an equal superposition over ``2^k`` strings."""
    _check_event(event)
    base = sum(1 << (i - 1) for i, b in event.votes.items() if b)
    pairs = event.pairs
    amp = 2.0 ** (-len(pairs) / 2)
    amps = np.zeros(2 ** event.n, dtype=complex)
    for choice in product((0, 1), repeat=len(pairs)):
        # choice 0: |0>_i|1>_j, choice 1: |1>_i|0>_j
        idx = base
        for (i, j), c in zip(pairs, choice):
            idx |= 1 << ((i if c else j) - 1)
        amps[idx] = amp
    return StateVector(event.n, amps)


def pvm_projector(n: int, s: int) -> np.ndarray:
    """Dense projector onto the span of weight-``s`` basis states."""
    if not 0 <= s <= n:
        raise InvalidArgument(f"s={s} outside 0..{n}")
    return np.diag((hamming_weights(n) == s).astype(complex))


def tally_pvm(state: StateVector) -> list:
    """Exact distribution of the yes-count measurement with post-measurement states."""
    amps = state.amplitudes
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1) > NORM_TOL:
        raise InvalidArgument("tally input is not normalized")
    w = hamming_weights(state.n_qubits)
    out = []
    for s in range(state.n_qubits + 1):
        v = np.where(w == s, amps, 0)
        p = float(np.vdot(v, v).real)
        if p >= PRUNE_TOL:
            out.append(TallyOutcome(s, p, StateVector(state.n_qubits, v / np.sqrt(p))))
    return out


def sample_tally(state: StateVector, rng: np.random.Generator) -> TallyOutcome:
    outcomes = tally_pvm(state)
    p = np.array([o.probability for o in outcomes])
    return outcomes[rng.choice(len(outcomes), p=p / p.sum())]


def pass_projector(event: Event) -> np.ndarray:
    """Rank-1 projector accepted by every party's ballot test."""
    phi = encode_event(event).amplitudes
    return np.outer(phi, phi.conj())


def _party_pass_amplitudes(party, event, amps):
    """Component of ``amps`` that passes the given party's test."""
    n = event.n
    if isinstance(party, tuple):
        return apply_local(_PSI_PLUS_PROJ, party, amps, n)
    bit = (np.arange(2 ** n) >> (party - 1)) & 1
    return np.where(bit == event.votes[party], amps, 0)


def ballot_test(event: Event, returned: Ensemble) -> BallotTestReport:
    """Exact pass probability of the joint test and each party's failure rate."""
    if returned.n_qubits != event.n:
        raise InvalidArgument(
            f"returned ballots have {returned.n_qubits} qubits, event has {event.n} voters")
    phi = encode_event(event).amplitudes
    passed = sum(p * abs(np.vdot(phi, s.amplitudes)) ** 2 for p, s in returned)
    per_party = []
    for party in event.parties:
        ok = 0.0
        for p, s in returned:
            v = _party_pass_amplitudes(party, event, s.amplitudes)
            ok += p * float(np.vdot(v, v).real)
        per_party.append((party, min(max(1.0 - ok, 0.0), 1.0)))
    return BallotTestReport(min(max(float(passed), 0.0), 1.0), tuple(per_party))


def run_honest_round(event: Event):
    """Encode, tally and test an un-attacked round."""
    outcomes = tally_pvm(encode_event(event))
    tally = max(outcomes, key=lambda o: o.probability)
    return tally, ballot_test(event, Ensemble.pure(tally.post_state))


def _matchings(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for idx, partner in enumerate(rest):
        for m in _matchings(rest[:idx] + rest[idx + 1:]):
            yield ((first, partner),) + m


def enumerate_events(n: int, s: Optional[int] = None) -> list:
    """Every event on ``n`` voters, optionally restricted to ``k + l == s``.

    Roles are assigned with voter 1 varying slowest in the order vote 0,
    vote 1, check; checkers are then paired in every perfect matching.
    """
    if n < 1:
        raise InvalidArgument("need at least one voter")
    if n > MAX_ENUM_VOTERS:
        raise ResourceLimit(f"event enumeration is capped at {MAX_ENUM_VOTERS} voters")
    events = []
    for roles in product((0, 1, "C"), repeat=n):
        checkers = [i for i, r in enumerate(roles, start=1) if r == "C"]
        if len(checkers) % 2:
            continue
        k = len(checkers) // 2
        if s is not None and k + sum(r for r in roles if r != "C") != s:
            continue
        votes = {i: r for i, r in enumerate(roles, start=1) if r != "C"}
        for matching in _matchings(checkers):
            events.append(Event.from_parts(n, votes, matching))
    return events


def count_events(n: int) -> int:
    """Closed-form event count: sum over k of C(n,2k) (2k-1)!! 2^(n-2k)."""
    return sum(comb(n, 2 * k) * prod(range(1, 2 * k, 2)) * 2 ** (n - 2 * k)
               for k in range(n // 2 + 1))


def sample_ballot_test(event: Event, state: StateVector, rng: np.random.Generator):
    """One shot of the ballot test; returns a failure flag per party.

    Parties measure one after another on the collapsing state, which
    reproduces the joint distribution because their projectors commute.
    """
    amps = state.amplitudes
    failures = []
    for party in event.parties:
        ok = _party_pass_amplitudes(party, event, amps)
        p_ok = float(np.vdot(ok, ok).real)
        if p_ok > 1 - PRUNE_TOL:
            p_ok = 1.0
        elif p_ok < PRUNE_TOL:
            p_ok = 0.0
        if rng.random() < p_ok:
            amps = ok / np.sqrt(p_ok)
            failures.append(False)
        else:
            bad = amps - ok
            amps = bad / np.linalg.norm(bad)
            failures.append(True)
    return failures


def _sample_kraus(amps, channel: KrausChannel, rng):
    outs = [k @ amps for k in channel.kraus_ops]
    w = np.array([float(np.vdot(v, v).real) for v in outs])
    x = rng.choice(len(outs), p=w / w.sum())
    return outs[x] / np.sqrt(w[x])


def monte_carlo_round(event: Event, shots: int, seed: int,
                      channel: Optional[KrausChannel] = None) -> dict:
    """Sampled tally, attack and ballot test over ``shots`` independent rounds.

    Returns counts keyed ``tally`` (s -> count), ``failures`` (rounds in
    which any party failed) and ``party_failures`` (per party, in
    ``event.parties`` order).
    """
    if shots < 1:
        raise InvalidArgument("shots must be positive")
    rng = np.random.default_rng(seed)
    encoded = encode_event(event)
    tally = {}
    failures = 0
    party_failures = [0] * len(event.parties)
    for _ in range(shots):
        outcome = sample_tally(encoded, rng)
        tally[outcome.s] = tally.get(outcome.s, 0) + 1
        amps = outcome.post_state.amplitudes
        if channel is not None:
            amps = _sample_kraus(amps, channel, rng)
        flags = sample_ballot_test(event, StateVector(event.n, amps), rng)
        failures += any(flags)
        for a, f in enumerate(flags):
            party_failures[a] += f
    return {"tally": dict(sorted(tally.items())), "failures": failures,
            "party_failures": party_failures}
