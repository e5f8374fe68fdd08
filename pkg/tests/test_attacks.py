import numpy as np
import pytest

from qvote.attacks import (ApparatusSpec, apparatus_to_channel, detection_probability,
                           diagonal_phase_attack, identity_attack, is_identity_up_to_phase,
                           max_detection, random_apparatus, single_qubit_attack, theorem_check,
                           validate_isometry, witness_event)
from qvote.ballots import enumerate_weight_class
from qvote.errors import InvalidArgument, ResourceLimit
from qvote.protocol import Event, encode_event, enumerate_events, pass_projector, pvm_projector
from qvote.qstate import KrausChannel

PI = np.pi


def density_matrix_detection(event, kraus_ops):
    """1 - tr(P_pass sum_x K rho K^dag), computed with dense density matrices."""
    phi = encode_event(event).amplitudes
    rho = np.outer(phi, phi.conj())
    out = sum(k @ rho @ k.conj().T for k in kraus_ops)
    return 1 - np.trace(pass_projector(event) @ out).real


def block(op, n, s):
    idx = np.array(enumerate_weight_class(n, s).indices)
    return op[np.ix_(idx, idx)]


# validate_isometry

def test_isometry_identity():
    chk = validate_isometry(ApparatusSpec.identity(3, 1))
    assert chk.ok and chk.deviation == 0


def test_isometry_diagonal_phases():
    assert validate_isometry(diagonal_phase_attack(2, 4, [0.1, 0.5, 1, 2, 3, 4])).ok


def test_isometry_violation():
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = a[0, 1, 0] = 1 / np.sqrt(2)
    chk = validate_isometry(ApparatusSpec(2, 1, a))
    assert not chk.ok and chk.deviation == pytest.approx(1.0)


# apparatus_to_channel

def test_identity_spec_gives_identity_channel():
    att = apparatus_to_channel(ApparatusSpec.identity(3, 1))
    assert len(att.kraus_ops) == 1
    np.testing.assert_allclose(att.kraus_ops[0], np.eye(8), atol=1e-15)


def test_diagonal_sign_spec():
    att = apparatus_to_channel(diagonal_phase_attack(1, 2, [0, PI]))
    (k,) = att.kraus_ops
    np.testing.assert_allclose(block(k, 2, 1), np.diag([1, -1]), atol=1e-15)


def test_computational_measurement_spec():
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = a[1, 1, 1] = 1
    ops = apparatus_to_channel(ApparatusSpec(2, 1, a)).kraus_ops
    assert len(ops) == 2
    np.testing.assert_allclose(block(ops[0], 2, 1), np.diag([1, 0]))  # |01><01|
    np.testing.assert_allclose(block(ops[1], 2, 1), np.diag([0, 1]))  # |10><10|


def test_kraus_matrix_element_orientation():
    # a_{12} = e1 only mixes input string 1 into output string 2
    rng = np.random.default_rng(0)
    spec = random_apparatus(3, 1, rng)
    ops = apparatus_to_channel(spec).kraus_ops
    idx = enumerate_weight_class(3, 1).indices
    for x, k in enumerate(ops):
        assert k[idx[1], idx[0]] == pytest.approx(spec.states[0, 1, x])


def test_channel_rejects_non_isometry():
    a = np.ones((2, 2, 1), dtype=complex)
    with pytest.raises(InvalidArgument):
        apparatus_to_channel(ApparatusSpec(2, 1, a))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_random_channels_conserve_and_confine(n):
    rng = np.random.default_rng(n)
    for s in range(n + 1):
        for _ in range(5):
            att = apparatus_to_channel(random_apparatus(n, s, rng))
            assert att.channel.completeness_deviation() < 1e-9
            p = pvm_projector(n, s)
            for k in att.kraus_ops:
                # outputs of V_s basis states stay inside V_s
                leak = (np.eye(2 ** n) - p) @ k @ p
                assert np.max(np.abs(leak)) < 1e-10


# named attacks

def test_single_qubit_attack_on_voter_passes():
    e = Event.from_tokens("1 C3 C2")
    assert detection_probability(e, single_qubit_attack(1, 3)) == pytest.approx(0, abs=1e-12)


def test_single_qubit_attack_on_checker():
    e = Event.from_tokens("C2 C1")
    assert detection_probability(e, single_qubit_attack(1, 2)) == pytest.approx(0.5, abs=1e-10)


def test_single_qubit_attack_on_zero_state():
    from qvote.qstate import Ensemble, apply_channel, basis_state
    out = apply_channel(Ensemble.pure(basis_state(3, "000")), single_qubit_attack(2, 3).channel)
    assert len(out) == 1 and out.branches[0].state.allclose(basis_state(3, "000"))


def test_single_qubit_attack_range():
    with pytest.raises(InvalidArgument):
        single_qubit_attack(4, 3)


def test_diagonal_zero_phases_is_identity():
    att = apparatus_to_channel(diagonal_phase_attack(2, 4, [0] * 6))
    assert max_detection(att, 4, 2).max_probability == pytest.approx(0, abs=1e-12)


def test_diagonal_sign_flip_turns_psi_plus_into_psi_minus():
    att = apparatus_to_channel(diagonal_phase_attack(1, 2, [0, PI]))
    assert detection_probability(Event.from_tokens("C2 C1"), att) == pytest.approx(1.0, abs=1e-12)


def test_global_phase_is_invisible():
    att = apparatus_to_channel(diagonal_phase_attack(2, 4, [0.77] * 6))
    assert max_detection(att, 4, 2).max_probability == pytest.approx(0, abs=1e-12)
    assert is_identity_up_to_phase(diagonal_phase_attack(2, 4, [0.77] * 6))


def test_diagonal_wrong_phase_count():
    with pytest.raises(InvalidArgument):
        diagonal_phase_attack(1, 3, [0, 1])


# detection_probability

def test_detection_identity_is_zero():
    e = Event.from_tokens("C2 C1 1 0")
    assert detection_probability(e, identity_attack(4)) == 0


def test_detection_rejects_tally_mismatch():
    att = apparatus_to_channel(ApparatusSpec.identity(2, 1))
    with pytest.raises(InvalidArgument):
        detection_probability(Event.from_tokens("1 1"), att)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_detection_matches_density_matrix_oracle(n):
    rng = np.random.default_rng(100 + n)
    for s in range(n + 1):
        att = apparatus_to_channel(random_apparatus(n, s, rng))
        for e in enumerate_events(n, s):
            assert detection_probability(e, att) == pytest.approx(
                density_matrix_detection(e, att.kraus_ops), abs=1e-10)


# max_detection

def test_max_detection_identity():
    assert max_detection(identity_attack(4), 4, 2).max_probability == 0


def test_max_detection_single_qubit():
    r = max_detection(single_qubit_attack(1, 2), 2, 1)
    assert r.max_probability == pytest.approx(0.5, abs=1e-10)
    assert str(r.max_event) == "C2 C1"
    assert [p for _, p in r.per_event] == pytest.approx([0, 0, 0.5], abs=1e-10)


def test_max_detection_computational_inside_subspace():
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = a[1, 1, 1] = 1
    r = max_detection(apparatus_to_channel(ApparatusSpec(2, 1, a)), 2, 1)
    assert r.max_probability == pytest.approx(0.5, abs=1e-10)


def test_max_detection_cap():
    with pytest.raises(ResourceLimit):
        max_detection(identity_attack(7), 7, 3)


# invariants over every event

ALL_EVENTS = [e for n in range(1, 7) for e in enumerate_events(n)]


@pytest.mark.parametrize("event", ALL_EVENTS, ids=str)
def test_identity_neutral_and_half_law(event):
    assert detection_probability(event, identity_attack(event.n)) < 1e-12
    for i in range(1, event.n + 1):
        p = detection_probability(event, single_qubit_attack(i, event.n))
        if i in event.votes:
            assert p == pytest.approx(0, abs=1e-12)
        else:
            assert p == pytest.approx(0.5, abs=1e-10)


# theorem

def test_theorem_check_small():
    r = theorem_check(3, 1, trials=100, seed=1)
    assert r.passed and r.failures == 0 and r.skipped == 0
    assert r.identity_max < 1e-12


def test_theorem_check_seeded_reproducible():
    assert theorem_check(3, 2, 5, seed=4) == theorem_check(3, 2, 5, seed=4)


@pytest.mark.parametrize("n, s", [(n, s) for n in (2, 3, 4) for s in range(1, n)])
def test_theorem_sampled(n, s):
    r = theorem_check(n, s, trials=100, seed=2024)
    assert r.failures == 0 and r.identity_max < 1e-12


def test_witness_none_for_identity():
    assert witness_event(ApparatusSpec.identity(3, 1)) is None
    assert witness_event(diagonal_phase_attack(1, 3, [0.4] * 3)) is None


def test_witness_two_distinct_phases():
    # strings 0011 (pi=1) and 0110 (pi=3) at n=4, s=2
    phases = [0, 0, 1.0, 0, 0, 0]
    spec = diagonal_phase_attack(2, 4, phases)
    e = witness_event(spec)
    # swap pairing of 0011 -> 0110 is [(3, 1)]; position 2 keeps its 1, position 4 its 0
    assert e.pairs == ((1, 3),) and e.votes == {2: 1, 4: 0}
    assert detection_probability(e, apparatus_to_channel(spec)) > 1e-9


def _mixing_spec(n, s, p, q, angle=0.3):
    d = len(enumerate_weight_class(n, s))
    u = np.eye(d, dtype=complex)
    c, sn = np.cos(angle), np.sin(angle)
    u[[p, p, q, q], [p, q, p, q]] = [c, -sn, sn, c]
    # a_{pq} = <m_q| U |m_p>
    return ApparatusSpec(n, s, u.T[:, :, None])


@pytest.mark.parametrize("n, s", [(n, s) for n in (2, 3, 4) for s in range(1, n)])
def test_proof_reconstruction_every_pair(n, s):
    wc = enumerate_weight_class(n, s)
    d = len(wc)
    for p in range(d):
        for q in range(d):
            if p == q:
                continue
            spec = _mixing_spec(n, s, p, q)
            att = apparatus_to_channel(spec)
            assert detection_probability(Event.from_bits(wc.strings[p]), att) > 1e-9
            phases = np.zeros(d)
            phases[q] = 0.5
            spec = diagonal_phase_attack(s, n, phases)
            e = witness_event(spec)
            assert e is not None and detection_probability(e, apparatus_to_channel(spec)) > 1e-9
