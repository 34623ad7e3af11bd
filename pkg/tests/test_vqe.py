import json

import numpy as np
import numpy.testing as npt
import pytest

from scarfinder.ansatz import AnsatzSpec, Circuit, Gate, build_ansatz, bulk_embed
from scarfinder.operators import (PauliOperator, PauliString, SectorSpec,
                                  build_h1, build_h2, scar_state_h1,
                                  symmetry_operator)
from scarfinder.statevector import Statevector, basis_state, zero_state
from scarfinder.vqe import (CostConfig, TrainConfig, cost, gradient, train,
                            train_fidelity)

from _oracles import dense_circuit_matrix, dense_pauli_matrix, fd_gradient


def h1_cost_config(params, weights=(0.05, 0.25, 0.70), target=0.0):
    n = params.num_sites
    return CostConfig(*weights, target, build_h1(params),
                      symmetry_operator(SectorSpec("H1", n // 2), n), n / 2)


def h2_cost_config(params, weights=(0.05, 0.25, 0.70), target=0.0, walls=2):
    n = params.num_sites
    return CostConfig(*weights, target, build_h2(params),
                      symmetry_operator(SectorSpec("H2", walls, "all-zero"),
                                        n), float(walls))


def oracle_cost(circuit, params, cfg, initial):
    """Cost recomputed through dense matrices, independent of the evaluator."""
    u = dense_circuit_matrix(circuit, np.asarray(params, dtype=float))
    psi = u @ initial.amplitudes
    h = dense_pauli_matrix(cfg.hamiltonian)
    s = dense_pauli_matrix(cfg.symmetry_op)
    e1 = np.vdot(psi, h @ psi).real
    e2 = np.vdot(psi, h @ h @ psi).real
    s1 = np.vdot(psi, s @ psi).real
    s2 = np.vdot(psi, s @ s @ psi).real
    return (cfg.weight_a * (e2 - 2 * cfg.target_energy * e1
                            + cfg.target_energy ** 2)
            + cfg.weight_b * (e2 - e1 ** 2)
            + cfg.weight_c * (s2 - 2 * cfg.symmetry_value * s1
                              + cfg.symmetry_value ** 2))


# -------------------- cost values --------------------

def test_cost_vanishes_on_target_eigenstate(h1_disordered):
    cfg = h1_cost_config(h1_disordered)
    circ = Circuit(6, (), 0)  # identity: probe the input state itself
    scar = scar_state_h1(h1_disordered)
    value, parts = cost(circ, np.zeros(0), cfg, scar)
    assert value < 1e-10
    assert set(parts) == {"energy_term", "variance_term", "symm_term"}


def test_cost_detuned_target_is_square_distance(h1_disordered):
    # on an exact eigenstate only the energy term survives: a (E' - E)^2
    detuned = h1_cost_config(h1_disordered, target=3.0)
    circ = Circuit(6, (), 0)
    scar = scar_state_h1(h1_disordered)
    value, parts = cost(circ, np.zeros(0), cfg=detuned, initial=scar)
    assert value == pytest.approx(0.05 * 9.0, abs=1e-9)
    assert parts["variance_term"] == pytest.approx(0.0, abs=1e-10)
    assert parts["symm_term"] == pytest.approx(0.0, abs=1e-10)


def test_cost_parts_nonnegative_and_sum(h1_disordered):
    cfg = h1_cost_config(h1_disordered)
    circ = build_ansatz(AnsatzSpec("HE", 6, 1))
    rng = np.random.default_rng(3)
    theta = rng.uniform(-1, 1, circ.num_params)
    value, parts = cost(circ, theta, cfg, zero_state(6))
    assert all(v >= 0 for v in parts.values())
    assert value == pytest.approx(sum(parts.values()))


@pytest.mark.parametrize("kind,depth", [("NN", 2), ("AA", 1), ("HE", 2)])
def test_cost_matches_dense_oracle_h1(kind, depth, h1_disordered):
    cfg = h1_cost_config(h1_disordered, weights=(0.2, 0.5, 0.3), target=-1.5)
    circ = build_ansatz(AnsatzSpec(kind, 6, depth))
    rng = np.random.default_rng(7)
    theta = rng.uniform(-np.pi, np.pi, circ.num_params)
    value, _ = cost(circ, theta, cfg, zero_state(6))
    assert value == pytest.approx(oracle_cost(circ, theta, cfg, zero_state(6)),
                                  rel=1e-10)


@pytest.mark.parametrize("edge_value", [0, 1])
def test_cost_matches_dense_oracle_embedded_h2(edge_value, h2_small):
    # chain edges are frozen out by the evaluator; the oracle keeps them
    cfg = h2_cost_config(h2_small, weights=(0.1, 0.4, 0.5), target=2.0)
    inner = build_ansatz(AnsatzSpec("HE", 4, 1))
    circ = bulk_embed(inner, 6, edge_value)
    rng = np.random.default_rng(11)
    theta = rng.uniform(-np.pi, np.pi, circ.num_params)
    value, _ = cost(circ, theta, cfg, zero_state(6))
    assert value == pytest.approx(oracle_cost(circ, theta, cfg, zero_state(6)),
                                  rel=1e-10)


def test_cost_from_superposition_input(h1_disordered):
    # non-basis inputs take the unfrozen path
    cfg = h1_cost_config(h1_disordered)
    circ = build_ansatz(AnsatzSpec("NN", 6, 1))
    rng = np.random.default_rng(5)
    amps = rng.normal(size=64) + 1j * rng.normal(size=64)
    amps /= np.linalg.norm(amps)
    initial = Statevector(6, amps)
    theta = rng.uniform(-np.pi, np.pi, circ.num_params)
    value, _ = cost(circ, theta, cfg, initial)
    assert value == pytest.approx(oracle_cost(circ, theta, cfg, initial),
                                  rel=1e-10)


def test_cost_config_validation(h1_disordered):
    h = build_h1(h1_disordered)
    s = symmetry_operator(SectorSpec("H1", 3), 6)
    with pytest.raises(ValueError, match="sum to 1"):
        CostConfig(0.5, 0.25, 0.30, 0.0, h, s, 3.0)
    with pytest.raises(ValueError, match=">= 0"):
        CostConfig(-0.1, 0.4, 0.7, 0.0, h, s, 3.0)
    with pytest.raises(ValueError, match="mismatch"):
        CostConfig(0.05, 0.25, 0.70, 0.0, h,
                   symmetry_operator(SectorSpec("H1", 2), 4), 2.0)


def test_cost_width_mismatches_rejected(h1_disordered):
    cfg = h1_cost_config(h1_disordered)
    with pytest.raises(ValueError, match="width"):
        cost(build_ansatz(AnsatzSpec("HE", 4, 1)), np.zeros(16), cfg,
             zero_state(4))
    with pytest.raises(ValueError, match="width"):
        cost(build_ansatz(AnsatzSpec("HE", 6, 1)), np.zeros(24), cfg,
             zero_state(4))


# -------------------- gradients --------------------

def test_gradient_single_qubit_by_hand():
    # RY on |0>, H = Z, target -1, pure energy cost: C = 2 + 2 cos(theta)
    circ = Circuit(1, (Gate("RY", (0,), 0),), 1)
    cfg = CostConfig(1.0, 0.0, 0.0, -1.0,
                     PauliOperator(1, [PauliString(1.0, {0: "Z"})]),
                     PauliOperator.identity(1), 0.0)
    for theta in (0.3, np.pi / 2, 2.0):
        value, _ = cost(circ, [theta], cfg, zero_state(1))
        assert value == pytest.approx(2 + 2 * np.cos(theta), abs=1e-12)
        g = gradient(circ, [theta], cfg, zero_state(1))
        assert g[0] == pytest.approx(-2 * np.sin(theta), abs=1e-12)
    assert gradient(circ, [np.pi / 2], cfg, zero_state(1))[0] == \
        pytest.approx(-2.0, abs=1e-12)


@pytest.mark.parametrize("kind,depth", [("NN", 2), ("AA", 1), ("HE", 1)])
def test_gradient_matches_finite_differences_h1(kind, depth, h1_disordered):
    cfg = h1_cost_config(h1_disordered, weights=(0.05, 0.25, 0.70),
                         target=-2.0)
    circ = build_ansatz(AnsatzSpec(kind, 6, depth))
    rng = np.random.default_rng(13)
    theta = rng.uniform(-1.5, 1.5, circ.num_params)
    g = gradient(circ, theta, cfg, zero_state(6))
    fd = fd_gradient(lambda x: cost(circ, x, cfg, zero_state(6))[0], theta)
    npt.assert_allclose(g, fd, rtol=1e-6, atol=1e-7)


def test_gradient_matches_finite_differences_embedded_h2(h2_small):
    cfg = h2_cost_config(h2_small, target=1.0)
    circ = bulk_embed(build_ansatz(AnsatzSpec("NN", 4, 2)), 6, 0)
    rng = np.random.default_rng(17)
    theta = rng.uniform(-1.5, 1.5, circ.num_params)
    g = gradient(circ, theta, cfg, zero_state(6))
    fd = fd_gradient(lambda x: cost(circ, x, cfg, zero_state(6))[0], theta)
    npt.assert_allclose(g, fd, rtol=1e-6, atol=1e-7)


# -------------------- training loop --------------------

def test_train_is_bitwise_deterministic(h1_disordered):
    cfg = h1_cost_config(h1_disordered)
    circ = build_ansatz(AnsatzSpec("HE", 6, 1))
    tcfg = TrainConfig(5, rng_seed=9)
    first = train(circ, cfg, tcfg, zero_state(6))
    second = train(circ, cfg, tcfg, zero_state(6))
    npt.assert_array_equal(first.costs, second.costs)
    npt.assert_array_equal(first.params, second.params)
    npt.assert_array_equal(first.state.amplitudes, second.state.amplitudes)
    other = train(circ, cfg, TrainConfig(5, rng_seed=10), zero_state(6))
    assert not np.array_equal(first.params, other.params)


def test_train_series_lengths_and_fields(h1_disordered):
    cfg = h1_cost_config(h1_disordered)
    circ = build_ansatz(AnsatzSpec("HE", 6, 1))
    scar = scar_state_h1(h1_disordered)
    rec = train(circ, cfg, TrainConfig(3), zero_state(6), probe_state=scar)
    for series in (rec.costs, rec.energies, rec.variances,
                   rec.symm_penalties, rec.probe_infidelities):
        assert len(series) == 4
    assert rec.seed == 0
    assert rec.aborted is False
    assert np.all((rec.probe_infidelities >= 0)
                  & (rec.probe_infidelities <= 1))
    assert rec.state.norm() == pytest.approx(1.0, abs=1e-12)


def test_train_rejects_zero_iterations():
    with pytest.raises(ValueError, match="iterations"):
        TrainConfig(0)
    with pytest.raises(ValueError, match="learning_rate"):
        TrainConfig(5, learning_rate=0.0)


def test_first_adam_step_is_sign_scaled_gradient(h1_disordered):
    # with bias correction the first update is -lr * g / (|g| + eps)
    cfg = h1_cost_config(h1_disordered)
    circ = build_ansatz(AnsatzSpec("HE", 6, 1))
    tcfg = TrainConfig(1, learning_rate=0.02, rng_seed=21)
    rec = train(circ, cfg, tcfg, zero_state(6))
    theta0 = np.random.default_rng(21).uniform(-0.01, 0.01, circ.num_params)
    g = gradient(circ, theta0, cfg, zero_state(6))
    expected = theta0 - 0.02 * g / (np.abs(g) + tcfg.adam_eps)
    npt.assert_allclose(rec.params, expected, atol=1e-12)


def test_descent_on_toy_problem():
    # RY landscape 2 + 2 cos(theta): ADAM must walk to the minimum at pi
    circ = Circuit(1, (Gate("RY", (0,), 0),), 1)
    cfg = CostConfig(1.0, 0.0, 0.0, -1.0,
                     PauliOperator(1, [PauliString(1.0, {0: "Z"})]),
                     PauliOperator.identity(1), 0.0)
    rec = train(circ, cfg, TrainConfig(800, learning_rate=0.05, rng_seed=1),
                zero_state(1))
    assert rec.costs[-1] < 1e-4
    assert abs(abs(rec.params[0]) - np.pi) < 0.05


def test_run_record_json_round_trip(tmp_path, h1_disordered):
    cfg = h1_cost_config(h1_disordered)
    circ = build_ansatz(AnsatzSpec("HE", 6, 1))
    rec = train(circ, cfg, TrainConfig(2, rng_seed=4), zero_state(6),
                probe_state=scar_state_h1(h1_disordered))
    path = tmp_path / "run.json"
    rec.save(path)
    loaded = json.loads(path.read_text())
    assert loaded["seed"] == 4
    assert loaded["train_config"]["iterations"] == 2
    assert loaded["cost_config"]["weight_c"] == 0.70
    assert len(loaded["series"]["cost"]) == 3
    assert len(loaded["series"]["probe_infidelity"]) == 3
    npt.assert_allclose(loaded["final_params"], rec.params)


def test_train_fidelity_reaches_product_target():
    circ = build_ansatz(AnsatzSpec("NN", 4, 2))
    target = basis_state(4, 0b0110)
    rec = train_fidelity(circ, target, TrainConfig(600, learning_rate=0.05),
                         zero_state(4))
    assert rec.infidelities[-1] < 1e-3
    assert len(rec.infidelities) == 601
    assert rec.aborted is False
