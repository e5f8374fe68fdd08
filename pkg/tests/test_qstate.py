import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvote.errors import InvalidArgument
from qvote.qstate import (BELL_KINDS, Ensemble, KrausChannel, StateVector, apply_channel,
                          apply_local, basis_state, bell_projectors, bell_state,
                          computational_projectors, embed_operator, measure_projectors, tensor)

S = 1 / np.sqrt(2)


def amps(state):
    return state.amplitudes


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return StateVector.from_unnormalized(n, v)


# basis_state

def test_basis_state_single_qubit():
    np.testing.assert_array_equal(amps(basis_state(1, "0")), [1, 0])


def test_basis_state_five_qubit_example():
    st5 = basis_state(5, "00010")
    assert np.flatnonzero(amps(st5)).tolist() == [2]


def test_basis_state_binary_index():
    assert np.flatnonzero(amps(basis_state(2, "11"))).tolist() == [3]


def test_basis_state_length_mismatch():
    with pytest.raises(InvalidArgument):
        basis_state(3, "01")


# bell_state

def test_bell_psi_plus():
    np.testing.assert_allclose(amps(bell_state("psi+", 1, 2, 2)), [0, S, S, 0], atol=1e-15)


def test_bell_phi_minus_greek_name():
    np.testing.assert_allclose(amps(bell_state("Φ−", 1, 2, 2)), [S, 0, 0, -S], atol=1e-15)


def test_bell_embedded_non_adjacent():
    v = amps(bell_state("psi+", 1, 3, 3))
    assert np.flatnonzero(v).tolist() == [1, 4]
    np.testing.assert_allclose(v[[1, 4]], [S, S])


def test_bell_psi_minus_orientation():
    # (|0>_i|1>_j - |1>_i|0>_j): qubit i=1 set gives index 1 with the minus sign
    v = amps(bell_state("psi-", 1, 2, 2))
    np.testing.assert_allclose(v, [0, -S, S, 0], atol=1e-15)


def test_bell_same_qubit_rejected():
    with pytest.raises(InvalidArgument):
        bell_state("psi+", 2, 2, 3)


# tensor

def test_tensor_basis():
    assert tensor(basis_state(1, "1"), basis_state(1, "0")).allclose(basis_state(2, "10"))


def test_tensor_zero_padding():
    v = amps(tensor(basis_state(1, "0"), bell_state("psi+", 1, 2)))
    assert np.flatnonzero(np.abs(v) > 1e-12).tolist() == [1, 2]


def test_tensor_two_pairs():
    psi = bell_state("psi+", 1, 2)
    v = amps(tensor(psi, psi))
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    assert nz.tolist() == sorted(int(b, 2) for b in ("0101", "0110", "1001", "1010"))
    np.testing.assert_allclose(v[nz], 0.5)


# measure_projectors

def test_measure_bell_eigenstate():
    out = measure_projectors(bell_state("psi+", 1, 2), bell_projectors(1, 2, 2))
    assert [(o.index, round(o.probability, 12)) for o in out] == [(BELL_KINDS.index("psi+"), 1.0)]


def test_measure_product_in_bell_basis():
    out = measure_projectors(basis_state(2, "01"), bell_projectors(1, 2, 2))
    got = {BELL_KINDS[o.index]: o.probability for o in out}
    assert got.keys() == {"psi+", "psi-"}
    assert got["psi+"] == pytest.approx(0.5, abs=1e-12)
    assert got["psi-"] == pytest.approx(0.5, abs=1e-12)


def test_measure_phi_plus_on_one_qubit():
    out = measure_projectors(bell_state("phi+", 1, 2), computational_projectors(1, 2))
    assert [o.index for o in out] == [0, 1]
    assert [o.probability for o in out] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert out[0].state.allclose(basis_state(2, "00"))
    assert out[1].state.allclose(basis_state(2, "11"))


def test_measure_rejects_incomplete_or_overlapping():
    p0, p1 = computational_projectors(1, 2)
    with pytest.raises(InvalidArgument):
        measure_projectors(basis_state(2, "00"), [p0])
    with pytest.raises(InvalidArgument):
        measure_projectors(basis_state(2, "00"), [p0, p0, p1])


# apply_channel

def test_channel_identity():
    psi = random_state(3, 0)
    out = apply_channel(Ensemble.pure(psi), KrausChannel.identity(8))
    assert len(out) == 1 and out.branches[0].probability == pytest.approx(1.0)
    assert out.branches[0].state.allclose(psi)


def test_channel_qubit_measurement_on_psi_plus():
    ch = KrausChannel(4, tuple(computational_projectors(1, 2)))
    out = apply_channel(Ensemble.pure(bell_state("psi+", 1, 2)), ch)
    got = sorted((round(p, 12), int(np.argmax(np.abs(s.amplitudes)))) for p, s in out)
    # |0>_1|1>_2 is "10" (index 2), |1>_1|0>_2 is "01" (index 1)
    assert got == [(0.5, 1), (0.5, 2)]


def test_channel_eigenstate_single_branch():
    ch = KrausChannel(4, tuple(computational_projectors(1, 2)))
    out = apply_channel(Ensemble.pure(basis_state(2, "00")), ch)
    assert len(out) == 1 and out.branches[0].state.allclose(basis_state(2, "00"))


def test_channel_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        apply_channel(Ensemble.pure(basis_state(2, "00")), KrausChannel.identity(8))


def test_channel_rejects_non_trace_preserving():
    with pytest.raises(InvalidArgument):
        KrausChannel(2, (np.diag([1, 0]),))


# properties

@pytest.mark.parametrize("n", [2, 3, 4])
def test_bell_projectors_resolve_identity_on_every_pair(n):
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                total = sum(bell_projectors(i, j, n))
                np.testing.assert_allclose(total, np.eye(2 ** n), atol=1e-10)


def test_embed_matches_kron_for_adjacent_qubits():
    rng = np.random.default_rng(5)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    # qubits (3, 2) of 3: qubit 3 is the leftmost factor
    np.testing.assert_allclose(embed_operator(m, (3, 2), 3), np.kron(m, np.eye(2)), atol=1e-12)
    np.testing.assert_allclose(embed_operator(m, (2, 1), 3), np.kron(np.eye(2), m), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 10 ** 6), n_ops=st.integers(1, 4))
def test_random_channel_conserves_probability(n, seed, n_ops):
    rng = np.random.default_rng(seed)
    d = 2 ** n
    z = rng.standard_normal((d * n_ops, d)) + 1j * rng.standard_normal((d * n_ops, d))
    q, _ = np.linalg.qr(z)
    ch = KrausChannel(d, tuple(q[x * d:(x + 1) * d] for x in range(n_ops)))
    ens = Ensemble(((0.3, random_state(n, seed)), (0.7, random_state(n, seed + 1))))
    out = apply_channel(ens, ch)
    assert sum(p for p, _ in out) == pytest.approx(1.0, abs=1e-10)
    for _, s in out:
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 10 ** 6), data=st.data())
def test_bell_measurement_probabilities_sum_to_one(n, seed, data):
    i, j = data.draw(st.lists(st.integers(1, n), min_size=2, max_size=2, unique=True))
    out = measure_projectors(random_state(n, seed), bell_projectors(i, j, n))
    assert sum(o.probability for o in out) == pytest.approx(1.0, abs=1e-10)


def test_apply_local_is_deterministic():
    psi = random_state(4, 9).amplitudes
    m = bell_projectors(1, 3, 2 + 2)[0]
    a = m @ psi
    b = m @ psi
    assert a.tobytes() == b.tobytes()
    loc = apply_local(np.eye(4), (4, 1), psi, 4)
    np.testing.assert_array_equal(loc, psi)


def test_state_is_immutable():
    st1 = basis_state(2, "01")
    with pytest.raises(ValueError):
        st1.amplitudes[0] = 1
