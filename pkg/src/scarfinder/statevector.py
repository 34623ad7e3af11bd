"""Exact n-qubit statevector simulation.

Conventions used across the package (see also operators.py):
  * little-endian indexing: bit q of an amplitude index is the state of
    qubit q, so |q_{n-1} ... q_1 q_0> sits at index sum_q q_q 2^q;
  * the computational |0> is the sigma^z = +1 eigenstate;
  * rotations follow R_P(theta) = exp(-i theta P / 2);
  * entropies are in nats (natural logarithm).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from .operators import PauliOperator

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("CZ", "X", "Z")

_IMAG_TOL = 1e-10
_SVD_FLOOR = 1e-14


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target qubit(s), and parameter slot if rotational."""

    kind: str
    targets: tuple[int, ...]
    param_slot: Optional[int] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        n_targets = 2 if self.kind == "CZ" else 1
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} target(s), "
                             f"got {self.targets}")
        if self.kind == "CZ" and self.targets[0] == self.targets[1]:
            raise ValueError("CZ targets must be distinct")
        if any(t < 0 for t in self.targets):
            raise ValueError("negative qubit index")
        is_rot = self.kind in ROTATION_KINDS
        if is_rot and self.param_slot is None:
            raise ValueError(f"{self.kind} requires a param_slot")
        if not is_rot and self.param_slot is not None:
            raise ValueError(f"{self.kind} takes no parameter")


class Statevector:
    """Normalized pure state of num_qubits qubits (complex128 amplitudes)."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (2 ** num_qubits,):
            raise ValueError(f"expected {2 ** num_qubits} amplitudes for "
                             f"{num_qubits} qubits, got {amplitudes.shape}")
        self.num_qubits = int(num_qubits)
        self.amplitudes = amplitudes

    def copy(self) -> "Statevector":
        return Statevector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        return f"Statevector(num_qubits={self.num_qubits})"


def zero_state(num_qubits: int) -> Statevector:
    amps = np.zeros(2 ** num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> Statevector:
    """Computational basis state |index> (little-endian bit = qubit)."""
    dim = 2 ** num_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(num_qubits, amps)


def _single_qubit_view(amps: np.ndarray, num_qubits: int, q: int):
    """Reshape so axis 1 is qubit q; returns (a0, a1) slices."""
    view = amps.reshape(2 ** (num_qubits - 1 - q), 2, 2 ** q)
    return view[:, 0, :], view[:, 1, :]


def apply_gate(state: Statevector, gate: Gate,
               params: Optional[Sequence[float]] = None) -> Statevector:
    """Return the state after one gate; R_P(theta) = exp(-i theta P / 2)."""
    n = state.num_qubits
    if any(t >= n for t in gate.targets):
        raise ValueError(f"gate {gate} out of range for {n} qubits")
    theta = None
    if gate.param_slot is not None:
        if params is None or gate.param_slot >= len(params):
            raise ValueError(f"cannot resolve param_slot {gate.param_slot}")
        theta = float(params[gate.param_slot])

    amps = state.amplitudes.copy()
    if gate.kind in ("RX", "RY", "RZ"):
        c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
        a0, a1 = _single_qubit_view(amps, n, gate.targets[0])
        if gate.kind == "RY":
            a0[:], a1[:] = c * a0 - s * a1, s * a0 + c * a1
        elif gate.kind == "RX":
            a0[:], a1[:] = c * a0 - 1j * s * a1, -1j * s * a0 + c * a1
        else:
            a0 *= c - 1j * s
            a1 *= c + 1j * s
    elif gate.kind == "X":
        a0, a1 = _single_qubit_view(amps, n, gate.targets[0])
        a0[:], a1[:] = a1.copy(), a0.copy()
    elif gate.kind == "Z":
        _, a1 = _single_qubit_view(amps, n, gate.targets[0])
        a1 *= -1.0
    elif gate.kind == "CZ":
        q0, q1 = gate.targets
        idx = np.arange(amps.size)
        both = ((idx >> q0) & 1).astype(bool) & ((idx >> q1) & 1).astype(bool)
        amps[both] *= -1.0
    return Statevector(n, amps)


def inner_product(a: Statevector, b: Statevector) -> complex:
    """<a|b>, conjugating the first argument."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("qubit-count mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(state: Statevector, obs: "PauliOperator") -> float:
    """<psi|O|psi>; asserts a tiny imaginary residual for Hermitian O."""
    if obs.num_qubits != state.num_qubits:
        raise ValueError("qubit-count mismatch between state and operator")
    val = complex(np.vdot(state.amplitudes, obs.apply(state.amplitudes)))
    if obs.is_hermitian() and abs(val.imag) >= _IMAG_TOL:
        raise AssertionError(f"imaginary residual {val.imag:.3e} for Hermitian "
                             "observable")
    return val.real


@dataclass(frozen=True)
class BipartitionSpec:
    """The subsystem kept after the partial trace."""

    subsystem_qubits: tuple[int, ...]

    def __post_init__(self):
        qs = tuple(sorted(int(q) for q in self.subsystem_qubits))
        if len(set(qs)) != len(qs):
            raise ValueError("subsystem qubits must be distinct")
        if qs and qs[0] < 0:
            raise ValueError("negative qubit index")
        object.__setattr__(self, "subsystem_qubits", qs)

    @classmethod
    def half_chain(cls, num_qubits: int) -> "BipartitionSpec":
        """First half of the chain: qubits 0 .. num_qubits//2 - 1."""
        return cls(tuple(range(num_qubits // 2)))


def entanglement_entropy(state: Statevector, cut: BipartitionSpec) -> float:
    """Von Neumann entropy (nats) of the reduced state on cut.subsystem_qubits.

    Computed from the singular values of the amplitude tensor reshaped to
    (kept, traced); Schmidt weights below 1e-14 contribute zero.
    """
    n = state.num_qubits
    keep = cut.subsystem_qubits
    if any(q >= n for q in keep):
        raise ValueError("cut qubit out of range")
    k = len(keep)
    if k == 0 or k == n:
        return 0.0
    tensor = state.amplitudes.reshape((2,) * n)
    # C-order reshape puts qubit q on axis n-1-q
    axes_keep = [n - 1 - q for q in keep]
    axes_rest = [ax for ax in range(n) if ax not in axes_keep]
    mat = tensor.transpose(axes_keep + axes_rest).reshape(2 ** k, 2 ** (n - k))
    sv = np.linalg.svd(mat, compute_uv=False)
    p = sv ** 2
    p = p[p > _SVD_FLOOR]
    return float(-np.sum(p * np.log(p)))


def save_statevector(state: Statevector, path) -> None:
    """JSON dump: num_qubits plus (re, im) pairs in index order."""
    payload = {
        "num_qubits": state.num_qubits,
        "amplitudes": [[float(a.real), float(a.imag)]
                       for a in state.amplitudes],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_statevector(path) -> Statevector:
    with open(path) as fh:
        payload = json.load(fh)
    amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    return Statevector(payload["num_qubits"], amps)
