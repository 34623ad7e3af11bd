import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarfinder.ansatz import (ANSATZ_KINDS, AnsatzSpec, Circuit,
                               build_ansatz, bulk_embed, format_circuit)
from scarfinder.operators import SectorSpec, symmetry_operator
from scarfinder.statevector import (BipartitionSpec, Gate, apply_gate,
                                    entanglement_entropy, expectation,
                                    zero_state)

from _oracles import dense_circuit_matrix


def run_circuit(circuit, params, initial=None):
    state = initial if initial is not None else zero_state(circuit.num_qubits)
    for gate in circuit.gates:
        state = apply_gate(state, gate, params)
    return state


def test_param_counts_match_published_protocol():
    assert AnsatzSpec("NN", 12, 10).num_params() == 132
    assert AnsatzSpec("AA", 12, 10).num_params() == 132
    assert AnsatzSpec("HE", 12, 2).num_params() == 96
    # the three circuit families are run with comparable parameter budgets
    assert abs(96 - 132) / 132 < 0.3


@given(kind=st.sampled_from(ANSATZ_KINDS), n=st.integers(2, 7),
       depth=st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_declared_count_equals_slots_used(kind, n, depth):
    spec = AnsatzSpec(kind, n, depth)
    circuit = build_ansatz(spec)
    slots = {g.param_slot for g in circuit.gates if g.param_slot is not None}
    assert len(slots) == spec.num_params() == circuit.num_params


@pytest.mark.parametrize("kind", ANSATZ_KINDS)
def test_zero_parameters_fix_the_vacuum(kind):
    circuit = build_ansatz(AnsatzSpec(kind, 4, 2))
    out = run_circuit(circuit, np.zeros(circuit.num_params))
    npt.assert_allclose(out.amplitudes, zero_state(4).amplitudes, atol=1e-12)


@pytest.mark.parametrize("kind", ANSATZ_KINDS)
@pytest.mark.parametrize("depth", [1, 2])
def test_circuit_matches_dense_unitary(kind, depth, rng):
    circuit = build_ansatz(AnsatzSpec(kind, 4, depth))
    params = rng.uniform(-np.pi, np.pi, circuit.num_params)
    got = run_circuit(circuit, params)
    want = dense_circuit_matrix(circuit, params) @ zero_state(4).amplitudes
    npt.assert_allclose(got.amplitudes, want, atol=1e-11)


def test_build_is_deterministic():
    a = build_ansatz(AnsatzSpec("HE", 6, 2))
    b = build_ansatz(AnsatzSpec("HE", 6, 2))
    assert a.gates == b.gates and a.num_params == b.num_params


def test_golden_he_block_layout():
    text = format_circuit(build_ansatz(AnsatzSpec("HE", 4, 1)))
    assert text == (
        "RY q0 slot0\nRY q1 slot1\nRY q2 slot2\nRY q3 slot3\n"
        "RZ q0 slot4\nRZ q1 slot5\nRZ q2 slot6\nRZ q3 slot7\n"
        "CZ q0 q1\nCZ q2 q3\n"
        "RY q0 slot8\nRY q1 slot9\nRY q2 slot10\nRY q3 slot11\n"
        "RZ q0 slot12\nRZ q1 slot13\nRZ q2 slot14\nRZ q3 slot15\n"
        "CZ q1 q2\n")


def test_golden_nn_layer_layout():
    text = format_circuit(build_ansatz(AnsatzSpec("NN", 3, 1)))
    assert text == (
        "RY q0 slot0\nRY q1 slot1\nRY q2 slot2\n"
        "CZ q0 q1\nCZ q1 q2\n"
        "RY q0 slot3\nRY q1 slot4\nRY q2 slot5\n")


def test_aa_couples_every_pair():
    circuit = build_ansatz(AnsatzSpec("AA", 5, 1))
    pairs = {g.targets for g in circuit.gates if g.kind == "CZ"}
    assert pairs == {(i, j) for i in range(5) for j in range(i + 1, 5)}


def test_spec_validation():
    with pytest.raises(ValueError):
        AnsatzSpec("XX", 4, 1)
    with pytest.raises(ValueError):
        AnsatzSpec("NN", 1, 1)
    with pytest.raises(ValueError):
        AnsatzSpec("NN", 4, -1)


def test_circuit_rejects_out_of_order_slots():
    gates = (Gate("RY", (0,), 1), Gate("RY", (1,), 0))
    with pytest.raises(ValueError):
        Circuit(2, gates, 2)


def test_circuit_rejects_unused_slots():
    gates = (Gate("RY", (0,), 0),)
    with pytest.raises(ValueError):
        Circuit(2, gates, 2)


@pytest.mark.parametrize("depth", [1, 2])
def test_he_entanglement_ceiling(depth, rng):
    # each CZ crossing the cut can add at most ln2 of half-chain entropy
    circuit = build_ansatz(AnsatzSpec("HE", 6, depth))
    cut = BipartitionSpec.half_chain(6)
    boundary = max(cut.subsystem_qubits)
    crossings = sum(1 for g in circuit.gates if g.kind == "CZ"
                    and min(g.targets) <= boundary < max(g.targets))
    bound = crossings * np.log(2)
    worst = 0.0
    for _ in range(100):
        params = rng.uniform(-np.pi, np.pi, circuit.num_params)
        state = run_circuit(circuit, params)
        worst = max(worst, entanglement_entropy(state, cut))
    assert worst <= bound + 1e-9


def test_bulk_embed_keeps_zero_edges(rng):
    inner = build_ansatz(AnsatzSpec("NN", 4, 1))
    lifted = bulk_embed(inner, 6, 0)
    params = rng.uniform(-np.pi, np.pi, lifted.num_params)
    state = run_circuit(lifted, params)
    amps = state.amplitudes
    idx = np.arange(amps.size)
    outside = (idx & 0b000001).astype(bool) | (idx >> 5 & 1).astype(bool)
    assert np.max(np.abs(amps[outside])) == 0.0


def test_bulk_embed_one_edges_supported_on_ones(rng):
    inner = build_ansatz(AnsatzSpec("NN", 4, 1))
    lifted = bulk_embed(inner, 6, 1)
    params = rng.uniform(-np.pi, np.pi, lifted.num_params)
    amps = run_circuit(lifted, params).amplitudes
    idx = np.arange(amps.size)
    both_ones = ((idx & 1) == 1) & ((idx >> 5 & 1) == 1)
    assert np.max(np.abs(amps[~both_ones])) == 0.0


def test_bulk_embed_theta_zero_has_no_domain_walls():
    inner = build_ansatz(AnsatzSpec("HE", 4, 1))
    lifted = bulk_embed(inner, 6, 0)
    state = run_circuit(lifted, np.zeros(lifted.num_params))
    ndw = symmetry_operator(SectorSpec("H2", 0, "all-zero"), 6)
    assert expectation(state, ndw) == pytest.approx(0.0, abs=1e-12)


def test_bulk_embed_size_mismatch():
    inner = build_ansatz(AnsatzSpec("NN", 4, 1))
    with pytest.raises(ValueError):
        bulk_embed(inner, 5, 0)
