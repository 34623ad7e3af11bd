"""Cost function, parameter-shift gradient, and ADAM training loop.

The cost of a circuit state |psi(theta)> against Hamiltonian H is

    C = a <(H - E)^2> + b (<H^2> - <H>^2) + c <(S - s)^2>,

with weights a + b + c = 1: a pulls toward the target energy E, b rewards
eigenstates (zero energy variance), and c penalizes leaving the symmetry
sector S = s. All three pieces reduce to the four moments <H>, <H^2>, <S>,
<S^2>, with <H^2> = |H psi|^2 via one flip-mask matvec.

Gradients use the parameter-shift rule (exact for the RY/RZ/RX gate set):
each of the four moments is evaluated at theta_g +- pi/2 per rotation gate
and combined by the chain rule, including the -2<H> d<H> variance term.

For speed the evaluator compiles the circuit to a flat opcode program
(consecutive CZ/Z gates fuse into one precomputed sign vector), freezes
qubits that are only ever acted on by X/Z from a basis-state input (the
chain edges of embedded bulk circuits), and stores amplitudes as separate
real/imaginary planes, dropping the imaginary plane entirely whenever the
circuit, input, and observables are all real.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as _k
from .ansatz import Circuit
from .operators import PauliOperator
from .statevector import Statevector

_SHIFT = np.pi / 2.0

_OPCODES = {"RX": _k.OP_RX, "RY": _k.OP_RY, "RZ": _k.OP_RZ,
            "CZ": _k.OP_CZ, "X": _k.OP_X, "Z": _k.OP_Z}


@dataclass(frozen=True)
class CostConfig:
    weight_a: float
    weight_b: float
    weight_c: float
    target_energy: float
    hamiltonian: PauliOperator
    symmetry_op: PauliOperator
    symmetry_value: float

    def __post_init__(self):
        w = (self.weight_a, self.weight_b, self.weight_c)
        if any(x < 0 for x in w):
            raise ValueError("weights must be >= 0")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(w)!r}")
        if self.hamiltonian.num_qubits != self.symmetry_op.num_qubits:
            raise ValueError("hamiltonian/symmetry qubit-count mismatch")

    def echo(self) -> dict:
        return {
            "weight_a": self.weight_a, "weight_b": self.weight_b,
            "weight_c": self.weight_c, "target_energy": self.target_energy,
            "symmetry_value": self.symmetry_value,
            "num_qubits": self.hamiltonian.num_qubits,
            "hamiltonian_terms": len(self.hamiltonian.terms),
        }


@dataclass(frozen=True)
class TrainConfig:
    iterations: int
    learning_rate: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    init_epsilon: float = 0.01
    rng_seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("ADAM betas must lie in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")

    def echo(self) -> dict:
        return {
            "iterations": self.iterations,
            "learning_rate": self.learning_rate,
            "adam_beta1": self.adam_beta1, "adam_beta2": self.adam_beta2,
            "adam_eps": self.adam_eps, "init_epsilon": self.init_epsilon,
            "rng_seed": self.rng_seed,
        }


@dataclass
class RunRecord:
    """Full optimization trace: series have length iterations+1 (start point)."""

    costs: np.ndarray
    energies: np.ndarray
    variances: np.ndarray
    symm_penalties: np.ndarray
    params: np.ndarray
    state: Statevector
    seed: int
    aborted: bool
    cost_config: dict
    train_config: dict
    probe_infidelities: Optional[np.ndarray] = None

    def to_json_dict(self) -> dict:
        out = {
            "cost_config": self.cost_config,
            "train_config": self.train_config,
            "seed": self.seed,
            "aborted": self.aborted,
            "series": {
                "cost": self.costs.tolist(),
                "energy": self.energies.tolist(),
                "variance": self.variances.tolist(),
                "symm_penalty": self.symm_penalties.tolist(),
            },
            "final_params": self.params.tolist(),
        }
        if self.probe_infidelities is not None:
            out["series"]["probe_infidelity"] = self.probe_infidelities.tolist()
        return out

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)


# -------------------- circuit compilation --------------------

def _basis_index(initial: Statevector) -> Optional[tuple[int, complex]]:
    """(index, amplitude) if the input is a computational basis state."""
    nz = np.nonzero(np.abs(initial.amplitudes) > 1e-14)[0]
    if nz.size != 1:
        return None
    amp = complex(initial.amplitudes[nz[0]])
    if abs(abs(amp) - 1.0) > 1e-12:
        return None
    return int(nz[0]), amp


def _candidate_frozen(circuit: Circuit, initial: Statevector) -> dict[int, int]:
    """Qubits acted on only by X/Z from a basis input can be folded away."""
    basis = _basis_index(initial)
    if basis is None:
        return {}
    touched_hard = set()
    for g in circuit.gates:
        if not (g.kind in ("X", "Z") and len(g.targets) == 1):
            touched_hard.update(g.targets)
    frozen_qubits = set(range(circuit.num_qubits)) - touched_hard
    if len(frozen_qubits) == circuit.num_qubits:
        return {}
    index = basis[0]
    frozen = {}
    for q in sorted(frozen_qubits):
        bit = (index >> q) & 1
        for g in circuit.gates:
            if q in g.targets and g.kind == "X":
                bit ^= 1
        frozen[q] = bit
    return frozen


class _Program:
    """Flat opcode program over the active (non-frozen) qubits."""

    def __init__(self, circuit: Circuit, initial: Statevector,
                 frozen: dict[int, int]):
        n = circuit.num_qubits
        self.frozen = dict(frozen)
        self.active = [q for q in range(n) if q not in frozen]
        self.num_qubits = n
        self.dim = 2 ** len(self.active)
        pos = {q: k for k, q in enumerate(self.active)}

        basis = _basis_index(initial)
        self.fold_phase = 1.0
        if frozen:
            # replay folded X/Z gates to fix the global sign
            bits = {q: (basis[0] >> q) & 1 for q in frozen}
            for g in circuit.gates:
                q = g.targets[0]
                if q in frozen:
                    if g.kind == "X":
                        bits[q] ^= 1
                    elif g.kind == "Z" and bits[q]:
                        self.fold_phase = -self.fold_phase

        kinds, qubits, auxes, slots = [], [], [], []
        diags: list[np.ndarray] = []
        pending: list = []  # run of diagonal CZ/Z gates awaiting fusion
        idx = np.arange(self.dim, dtype=np.int64)

        def flush():
            if not pending:
                return
            if len(pending) == 1:
                g = pending[0]
                if g.kind == "CZ":
                    kinds.append(_k.OP_CZ)
                    qubits.append(pos[g.targets[0]])
                    auxes.append(pos[g.targets[1]])
                else:
                    kinds.append(_k.OP_Z)
                    qubits.append(pos[g.targets[0]])
                    auxes.append(0)
                slots.append(-1)
            else:
                sign = np.ones(self.dim, dtype=np.float64)
                for g in pending:
                    if g.kind == "CZ":
                        b0 = (idx >> pos[g.targets[0]]) & 1
                        b1 = (idx >> pos[g.targets[1]]) & 1
                        sign[(b0 & b1) == 1] *= -1.0
                    else:
                        sign[((idx >> pos[g.targets[0]]) & 1) == 1] *= -1.0
                kinds.append(_k.OP_DIAG)
                qubits.append(0)
                auxes.append(len(diags))
                slots.append(-1)
                diags.append(sign)
            pending.clear()

        self.has_complex_gates = False
        for g in circuit.gates:
            if all(t in frozen for t in g.targets):
                continue  # folded
            if g.kind in ("CZ", "Z"):
                pending.append(g)
                continue
            flush()
            kinds.append(_OPCODES[g.kind])
            qubits.append(pos[g.targets[0]])
            auxes.append(0)
            slots.append(-1 if g.param_slot is None else g.param_slot)
            if g.kind in ("RX", "RZ"):
                self.has_complex_gates = True
        flush()

        self.kinds = np.array(kinds, dtype=np.int64)
        self.qubits = np.array(qubits, dtype=np.int64)
        self.auxes = np.array(auxes, dtype=np.int64)
        self.slots = np.array(slots, dtype=np.int64)
        self.diags = (np.stack(diags) if diags
                      else np.empty((1, self.dim), dtype=np.float64))
        self.n_ops = len(kinds)
        self.param_ops = [(g, int(self.slots[g])) for g in range(self.n_ops)
                          if self.slots[g] >= 0]

        # embedding reduced index -> full index
        emb = np.zeros(self.dim, dtype=np.int64)
        for k, q in enumerate(self.active):
            emb |= ((idx >> k) & 1) << q
        base = 0
        for q, b in self.frozen.items():
            base |= b << q
        self.embed_indices = emb | base

        if basis is not None:
            r0 = 0
            for k, q in enumerate(self.active):
                r0 |= ((basis[0] >> q) & 1) << k
            self.init_reduced = None
            self.init_index = r0
            self.init_amp = basis[1] * self.fold_phase
        else:
            self.init_index = None
            self.init_amp = None
            self.init_reduced = initial.amplitudes.copy()

    def initial_is_real(self) -> bool:
        if self.init_index is not None:
            return abs(complex(self.init_amp).imag) < 1e-14
        return bool(np.max(np.abs(self.init_reduced.imag)) < 1e-14)

    def make_initial(self, planes: int) -> np.ndarray:
        x = np.zeros((planes, self.dim), dtype=np.float64)
        if self.init_index is not None:
            amp = complex(self.init_amp)
            x[0, self.init_index] = amp.real
            if planes == 2:
                x[1, self.init_index] = amp.imag
        else:
            x[0] = self.init_reduced.real
            if planes == 2:
                x[1] = self.init_reduced.imag
        return x


def _planes_of(state: Statevector, indices: np.ndarray) -> np.ndarray:
    """Gather amplitudes at the given full-space indices as two planes."""
    g = state.amplitudes[indices]
    return np.ascontiguousarray(np.stack([g.real, g.imag]))


class _Evaluator:
    """Compiled (circuit, cost config, input) triple with reusable buffers."""

    def __init__(self, circuit: Circuit, cfg: CostConfig, initial: Statevector):
        if cfg.hamiltonian.num_qubits != circuit.num_qubits:
            raise ValueError("hamiltonian does not match circuit width")
        if initial.num_qubits != circuit.num_qubits:
            raise ValueError("initial state does not match circuit width")
        self.cfg = cfg
        frozen = _candidate_frozen(circuit, initial)
        try:
            self.h_op = cfg.hamiltonian.to_mask_form(frozen)
            self.s_diag = (cfg.symmetry_op.diagonal_vector(frozen)
                           if cfg.symmetry_op.is_diagonal() else None)
            self.s_op = (None if self.s_diag is not None
                         else cfg.symmetry_op.to_mask_form(frozen))
        except ValueError:
            # operator touches a frozen qubit with X/Y: fall back to full width
            frozen = {}
            self.h_op = cfg.hamiltonian.to_mask_form(frozen)
            self.s_diag = (cfg.symmetry_op.diagonal_vector(frozen)
                           if cfg.symmetry_op.is_diagonal() else None)
            self.s_op = (None if self.s_diag is not None
                         else cfg.symmetry_op.to_mask_form(frozen))
        self.prog = _Program(circuit, initial, frozen)

        real_ok = (not self.prog.has_complex_gates
                   and self.prog.initial_is_real()
                   and self.h_op.is_real
                   and (self.s_op is None or self.s_op.is_real))
        self.planes = 1 if real_ok else 2

        dim = self.prog.dim
        self._init = self.prog.make_initial(self.planes)
        self._buf = np.empty((self.planes, dim))   # unshifted forward state
        self._sbuf = np.empty((self.planes, dim))  # shifted-state workspace
        self._y = np.empty((self.planes, dim))
        self._snaps = None
        self._params_tmp = None
        self.num_params = circuit.num_params

    # ---------- single-state evaluation ----------

    def _forward(self, params, snapshots=False):
        p = self.prog
        buf = self._buf
        buf[:] = self._init
        if not snapshots:
            _k.run_program(buf, p.kinds, p.qubits, p.auxes, p.slots, params,
                           p.diags, 0, p.n_ops)
            return buf
        if self._snaps is None:
            self._snaps = np.empty((len(p.param_ops), self.planes, p.dim))
        start = 0
        for k, (g, _) in enumerate(p.param_ops):
            _k.run_program(buf, p.kinds, p.qubits, p.auxes, p.slots, params,
                           p.diags, start, g)
            self._snaps[k] = buf
            start = g
        _k.run_program(buf, p.kinds, p.qubits, p.auxes, p.slots, params,
                       p.diags, start, p.n_ops)
        return buf

    def _quadratic(self, x, op):
        if op.is_real:
            return _k.apply_masks(op.values, op.masks, x, self._y)
        return _k.apply_masks_c(op.values, op.values_imag, op.masks, x,
                                self._y)

    def _moments_of(self, x):
        h, h2 = self._quadratic(x, self.h_op)
        if self.s_diag is not None:
            s1, s2 = _k.diag_moments(x, self.s_diag)
        else:
            s1, s2 = self._quadratic(x, self.s_op)
        return h, h2, s1, s2

    def moments(self, params):
        """(<H>, <H^2>, <S>, <S^2>) at the circuit output."""
        params = np.asarray(params, dtype=np.float64)
        return self._moments_of(self._forward(params))

    def cost_terms(self, moments):
        """Weighted (energy, variance, symmetry) terms; roundoff clamped at 0."""
        h, h2, s1, s2 = moments
        cfg = self.cfg
        e_term = max(h2 - 2.0 * cfg.target_energy * h + cfg.target_energy ** 2,
                     0.0)
        v_term = max(h2 - h * h, 0.0)
        s_term = max(s2 - 2.0 * cfg.symmetry_value * s1
                     + cfg.symmetry_value ** 2, 0.0)
        return (cfg.weight_a * e_term, cfg.weight_b * v_term,
                cfg.weight_c * s_term)

    # ---------- gradient ----------

    def gradient_and_moments(self, params):
        """Parameter-shift gradient plus the unshifted moments (one pass)."""
        params = np.asarray(params, dtype=np.float64)
        p = self.prog
        cfg = self.cfg
        amps = self._forward(params, snapshots=True)
        mom0 = self._moments_of(amps)
        h_bar = mom0[0]

        if self._params_tmp is None:
            self._params_tmp = np.empty_like(params)
        tmp = self._params_tmp
        grad = np.zeros(self.num_params, dtype=np.float64)
        sbuf = self._sbuf
        for k, (g, slot) in enumerate(p.param_ops):
            shifted = np.zeros(4)
            for sgn in (1.0, -1.0):
                tmp[:] = params
                tmp[slot] += sgn * _SHIFT
                sbuf[:] = self._snaps[k]
                _k.run_program(sbuf, p.kinds, p.qubits, p.auxes, p.slots, tmp,
                               p.diags, g, g + 1)
                _k.run_program(sbuf, p.kinds, p.qubits, p.auxes, p.slots,
                               params, p.diags, g + 1, p.n_ops)
                m = self._moments_of(sbuf)
                for i in range(4):
                    shifted[i] += sgn * m[i]
            dh, dh2, ds1, ds2 = 0.5 * shifted
            grad[slot] += (cfg.weight_a * (dh2 - 2.0 * cfg.target_energy * dh)
                           + cfg.weight_b * (dh2 - 2.0 * h_bar * dh)
                           + cfg.weight_c
                           * (ds2 - 2.0 * cfg.symmetry_value * ds1))
        return grad, mom0

    # ---------- output state ----------

    def state(self, params) -> Statevector:
        params = np.asarray(params, dtype=np.float64)
        x = self._forward(params)
        red = x[0] + 1j * x[1] if self.planes == 2 else x[0] + 0j
        full = np.zeros(2 ** self.prog.num_qubits, dtype=np.complex128)
        full[self.prog.embed_indices] = red
        return Statevector(self.prog.num_qubits, full)

    def reduced_target(self, target: Statevector) -> np.ndarray:
        """Target amplitudes gathered onto the reduced space (for overlaps)."""
        return _planes_of(target, self.prog.embed_indices)


# -------------------- public operations --------------------

def cost(circuit: Circuit, params, cfg: CostConfig,
         initial: Statevector) -> tuple[float, dict]:
    """Cost value and its three weighted components."""
    ev = _Evaluator(circuit, cfg, initial)
    e_term, v_term, s_term = ev.cost_terms(ev.moments(params))
    total = e_term + v_term + s_term
    return total, {"energy_term": e_term, "variance_term": v_term,
                   "symm_term": s_term}


def gradient(circuit: Circuit, params, cfg: CostConfig,
             initial: Statevector) -> np.ndarray:
    """Exact gradient of cost() via the parameter-shift rule."""
    ev = _Evaluator(circuit, cfg, initial)
    grad, _ = ev.gradient_and_moments(params)
    return grad


def train(circuit: Circuit, cfg: CostConfig, tcfg: TrainConfig,
          initial: Statevector,
          probe_state: Optional[Statevector] = None) -> RunRecord:
    """Minimize the cost with ADAM for a fixed iteration budget.

    Parameters start uniformly in [-init_epsilon, init_epsilon]; there is no
    early stopping. If probe_state is given, the infidelity to it is traced
    alongside the cost series.
    """
    ev = _Evaluator(circuit, cfg, initial)
    rng = np.random.default_rng(tcfg.rng_seed)
    theta = rng.uniform(-tcfg.init_epsilon, tcfg.init_epsilon,
                        size=circuit.num_params)

    n_it = tcfg.iterations
    costs = np.zeros(n_it + 1)
    energies = np.zeros(n_it + 1)
    variances = np.zeros(n_it + 1)
    symm = np.zeros(n_it + 1)
    probe_inf = np.zeros(n_it + 1) if probe_state is not None else None
    probe_red = (ev.reduced_target(probe_state)
                 if probe_state is not None else None)

    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    aborted = False
    steps_done = 0

    def record(i, moments):
        e_term, v_term, s_term = ev.cost_terms(moments)
        costs[i] = e_term + v_term + s_term
        energies[i] = moments[0]
        variances[i] = max(moments[1] - moments[0] ** 2, 0.0)
        symm[i] = max(moments[3] - 2 * cfg.symmetry_value * moments[2]
                      + cfg.symmetry_value ** 2, 0.0)
        if probe_inf is not None:
            # _buf still holds the unshifted forward state at this point
            re, im = _k.overlap(probe_red, ev._buf)
            probe_inf[i] = 1.0 - min(re * re + im * im, 1.0)
        return costs[i]

    for t in range(1, n_it + 1):
        grad, mom = ev.gradient_and_moments(theta)
        c = record(t - 1, mom)
        if not (np.isfinite(c) and np.all(np.isfinite(grad))):
            aborted = True
            steps_done = t - 1
            break
        m = tcfg.adam_beta1 * m + (1 - tcfg.adam_beta1) * grad
        v = tcfg.adam_beta2 * v + (1 - tcfg.adam_beta2) * grad * grad
        m_hat = m / (1 - tcfg.adam_beta1 ** t)
        v_hat = v / (1 - tcfg.adam_beta2 ** t)
        theta = theta - tcfg.learning_rate * m_hat / (np.sqrt(v_hat)
                                                      + tcfg.adam_eps)
        steps_done = t
    if not aborted:
        record(n_it, ev.moments(theta))
        steps_done = n_it

    end = steps_done + 1
    return RunRecord(
        costs=costs[:end], energies=energies[:end],
        variances=variances[:end], symm_penalties=symm[:end],
        params=theta, state=ev.state(theta), seed=tcfg.rng_seed,
        aborted=aborted, cost_config=cfg.echo(), train_config=tcfg.echo(),
        probe_infidelities=None if probe_inf is None else probe_inf[:end],
    )


@dataclass
class FidelityRecord:
    """Trace of direct infidelity minimization (the oracle-cost baseline)."""

    infidelities: np.ndarray
    params: np.ndarray
    state: Statevector
    seed: int
    aborted: bool
    train_config: dict


def train_fidelity(circuit: Circuit, target: Statevector, tcfg: TrainConfig,
                   initial: Statevector) -> FidelityRecord:
    """Minimize 1 - |<target|psi(theta)>|^2 with ADAM and parameter shifts.

    The overlap is an expectation of the rank-1 projector on the target, so
    the same shift rule applies; this is the best-possible cost available
    only when the target state is known analytically.
    """
    dummy = CostConfig(1.0, 0.0, 0.0, 0.0,
                       PauliOperator.identity(circuit.num_qubits),
                       PauliOperator.identity(circuit.num_qubits), 0.0)
    ev = _Evaluator(circuit, dummy, initial)
    t_red = ev.reduced_target(target)
    rng = np.random.default_rng(tcfg.rng_seed)
    theta = rng.uniform(-tcfg.init_epsilon, tcfg.init_epsilon,
                        size=circuit.num_params)

    def fid(x):
        re, im = _k.overlap(t_red, x)
        return re * re + im * im

    p = ev.prog
    n_it = tcfg.iterations
    infid = np.zeros(n_it + 1)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    aborted = False
    steps_done = 0
    tmp = np.empty_like(theta)
    for t in range(1, n_it + 1):
        amps = ev._forward(theta, snapshots=True)
        infid[t - 1] = 1.0 - fid(amps)
        grad = np.zeros_like(theta)
        for k, (g, slot) in enumerate(p.param_ops):
            df = 0.0
            for sgn in (1.0, -1.0):
                tmp[:] = theta
                tmp[slot] += sgn * _SHIFT
                ev._sbuf[:] = ev._snaps[k]
                _k.run_program(ev._sbuf, p.kinds, p.qubits, p.auxes, p.slots,
                               tmp, p.diags, g, g + 1)
                _k.run_program(ev._sbuf, p.kinds, p.qubits, p.auxes, p.slots,
                               theta, p.diags, g + 1, p.n_ops)
                df += sgn * fid(ev._sbuf)
            grad[slot] += -0.5 * df
        if not (np.isfinite(infid[t - 1]) and np.all(np.isfinite(grad))):
            aborted = True
            steps_done = t - 1
            break
        m = tcfg.adam_beta1 * m + (1 - tcfg.adam_beta1) * grad
        v = tcfg.adam_beta2 * v + (1 - tcfg.adam_beta2) * grad * grad
        theta = theta - tcfg.learning_rate * (
            m / (1 - tcfg.adam_beta1 ** t)
            / (np.sqrt(v / (1 - tcfg.adam_beta2 ** t)) + tcfg.adam_eps))
        steps_done = t
    if not aborted:
        infid[n_it] = 1.0 - fid(ev._forward(theta))
        steps_done = n_it
    return FidelityRecord(infidelities=infid[:steps_done + 1], params=theta,
                          state=ev.state(theta), seed=tcfg.rng_seed,
                          aborted=aborted, train_config=tcfg.echo())
