import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarfinder.statevector import (BipartitionSpec, Gate, Statevector,
                                    apply_gate, basis_state,
                                    entanglement_entropy, inner_product,
                                    load_statevector, save_statevector,
                                    zero_state)

from _oracles import (dense_cz, dense_gate, dense_single,
                      partial_trace_entropy)


def random_state(n, rng):
    amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return Statevector(n, amps / np.linalg.norm(amps))


def test_zero_state_is_index_zero():
    state = zero_state(3)
    npt.assert_allclose(state.amplitudes, np.eye(8)[0])


def test_basis_state_places_single_amplitude():
    state = basis_state(4, 0b1010)
    assert state.amplitudes[0b1010] == 1.0
    assert np.count_nonzero(state.amplitudes) == 1


def test_basis_state_rejects_out_of_range():
    with pytest.raises(ValueError):
        basis_state(3, 8)


@pytest.mark.parametrize("kind", ["RX", "RY", "RZ"])
@pytest.mark.parametrize("qubit", [0, 1, 2])
def test_rotations_match_dense_oracle(kind, qubit, rng):
    state = random_state(3, rng)
    theta = 0.731
    got = apply_gate(state, Gate(kind, (qubit,), 0), [theta])
    want = dense_single(dense_gate(kind, theta), qubit, 3) @ state.amplitudes
    npt.assert_allclose(got.amplitudes, want, atol=1e-12)


@pytest.mark.parametrize("pair", [(0, 1), (1, 2), (0, 2), (2, 0)])
def test_cz_matches_dense_oracle(pair, rng):
    state = random_state(3, rng)
    got = apply_gate(state, Gate("CZ", pair))
    want = dense_cz(pair[0], pair[1], 3) @ state.amplitudes
    npt.assert_allclose(got.amplitudes, want, atol=1e-12)


def test_x_flips_target_bit():
    got = apply_gate(zero_state(3), Gate("X", (1,)))
    npt.assert_allclose(got.amplitudes, np.eye(8)[0b010])


def test_cz_symmetric_in_targets(rng):
    state = random_state(4, rng)
    a = apply_gate(state, Gate("CZ", (1, 3)))
    b = apply_gate(state, Gate("CZ", (3, 1)))
    npt.assert_allclose(a.amplitudes, b.amplitudes)


def test_gate_rejects_bad_arity():
    with pytest.raises(ValueError):
        Gate("CZ", (1,))
    with pytest.raises(ValueError):
        Gate("RY", (0, 1), 0)
    with pytest.raises(ValueError):
        Gate("CZ", (2, 2))


def test_apply_gate_out_of_range():
    with pytest.raises(ValueError):
        apply_gate(zero_state(2), Gate("X", (2,)))


@given(theta=st.floats(-7.0, 7.0), seed=st.integers(0, 2 ** 16))
@settings(max_examples=30, deadline=None)
def test_rotations_preserve_norm(theta, seed):
    state = random_state(3, np.random.default_rng(seed))
    for kind in ("RX", "RY", "RZ"):
        out = apply_gate(state, Gate(kind, (1,), 0), [theta])
        assert abs(out.norm() - 1.0) < 1e-12


@given(theta=st.floats(-7.0, 7.0))
@settings(max_examples=30, deadline=None)
def test_rotation_composition(theta):
    # R(theta) then R(-theta) is the identity
    state = random_state(2, np.random.default_rng(5))
    gate = Gate("RY", (0,), 0)
    out = apply_gate(apply_gate(state, gate, [theta]), gate, [-theta])
    npt.assert_allclose(out.amplitudes, state.amplitudes, atol=1e-12)


def test_inner_product_conjugation(rng):
    a, b = random_state(3, rng), random_state(3, rng)
    assert inner_product(a, b) == pytest.approx(
        np.conj(inner_product(b, a)))


def test_entropy_product_state_is_zero():
    state = basis_state(4, 0b0110)
    cut = BipartitionSpec.half_chain(4)
    assert entanglement_entropy(state, cut) == pytest.approx(0.0, abs=1e-12)


def test_entropy_bell_pair_is_ln2():
    amps = np.zeros(4)
    amps[0b00] = amps[0b11] = 1 / np.sqrt(2)
    ent = entanglement_entropy(Statevector(2, amps), BipartitionSpec((0,)))
    assert ent == pytest.approx(np.log(2), rel=1e-12)


@pytest.mark.parametrize("keep", [(0,), (0, 1), (0, 2), (1, 3), (0, 1, 2)])
def test_entropy_matches_partial_trace_oracle(keep, rng):
    state = random_state(4, rng)
    got = entanglement_entropy(state, BipartitionSpec(keep))
    want = partial_trace_entropy(state.amplitudes, keep, 4)
    assert got == pytest.approx(want, abs=1e-10)


def test_entropy_symmetric_under_complement(rng):
    state = random_state(5, rng)
    left = entanglement_entropy(state, BipartitionSpec((0, 1)))
    right = entanglement_entropy(state, BipartitionSpec((2, 3, 4)))
    assert left == pytest.approx(right, abs=1e-10)


def test_half_chain_helper():
    assert BipartitionSpec.half_chain(6).subsystem_qubits == (0, 1, 2)


def test_bipartition_rejects_duplicates():
    with pytest.raises(ValueError):
        BipartitionSpec((1, 1))


def test_save_load_round_trip(tmp_path, rng):
    state = random_state(3, rng)
    path = tmp_path / "state.json"
    save_statevector(state, path)
    back = load_statevector(path)
    assert back.num_qubits == 3
    npt.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-15)


def test_saved_format_is_re_im_pairs(tmp_path):
    state = basis_state(2, 0b01)
    path = tmp_path / "state.json"
    save_statevector(state, path)
    payload = json.loads(path.read_text())
    assert payload["num_qubits"] == 2
    assert payload["amplitudes"][0b01] == [1.0, 0.0]
