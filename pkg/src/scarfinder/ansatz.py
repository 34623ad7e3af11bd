"""Shallow parametric circuits: layered RY/CZ families and a generic block form.

Three kinds are provided, trading entangling power against depth:
  NN  per layer: RY on every qubit, then a CZ chain (0,1)..(n-2,n-1);
      one extra RY layer closes the circuit. Parameters: n*(depth+1).
  AA  like NN but the entangler couples every pair i<j. Same count.
  HE  per block: RY then RZ on every qubit, CZ on even pairs (0,1),(2,3),..,
      RY then RZ again, CZ on odd pairs (1,2),(3,4),.. Interleaving rotations
      between the two CZ sublayers is what lets a two-block circuit reach the
      entangled targets; a single rotation sandwich cannot (its fidelity
      plateaus well below one half on the states of interest).
      `depth` counts blocks. Parameters: 4*n*depth.

NN and AA use RY only (both model Hamiltonians are real, so real amplitudes
suffice); HE keeps RZ. Parameter slots are numbered in first-use order, so
gate lists are bitwise deterministic for a given spec.
"""
from __future__ import annotations

from dataclasses import dataclass

from .statevector import Gate

ANSATZ_KINDS = ("NN", "AA", "HE")


@dataclass(frozen=True)
class AnsatzSpec:
    kind: str
    num_qubits: int
    depth: int

    def __post_init__(self):
        if self.kind not in ANSATZ_KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.num_qubits < 2:
            raise ValueError("need at least 2 qubits")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    def num_params(self) -> int:
        n, d = self.num_qubits, self.depth
        return 4 * n * d if self.kind == "HE" else n * (d + 1)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list with a fixed parameter count."""

    num_qubits: int
    gates: tuple[Gate, ...]
    num_params: int

    def __post_init__(self):
        seen = -1
        used = set()
        for g in self.gates:
            if any(t >= self.num_qubits for t in g.targets):
                raise ValueError(f"gate {g} exceeds {self.num_qubits} qubits")
            if g.param_slot is not None:
                if g.param_slot >= self.num_params:
                    raise ValueError("param_slot out of range")
                if g.param_slot not in used and g.param_slot != seen + 1:
                    raise ValueError("param slots must appear in first-use order")
                seen = max(seen, g.param_slot)
                used.add(g.param_slot)
        if len(used) != self.num_params:
            raise ValueError(f"{self.num_params} params declared, "
                             f"{len(used)} slots used")


def build_ansatz(spec: AnsatzSpec) -> Circuit:
    n = spec.num_qubits
    gates: list[Gate] = []
    slot = 0

    def rot_layer(kind: str):
        nonlocal slot
        for q in range(n):
            gates.append(Gate(kind, (q,), slot))
            slot += 1

    if spec.kind in ("NN", "AA"):
        for _ in range(spec.depth):
            rot_layer("RY")
            if spec.kind == "NN":
                pairs = [(q, q + 1) for q in range(n - 1)]
            else:
                pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
            gates.extend(Gate("CZ", pair) for pair in pairs)
        rot_layer("RY")
    else:  # HE
        even = [(q, q + 1) for q in range(0, n - 1, 2)]
        odd = [(q, q + 1) for q in range(1, n - 1, 2)]
        for _ in range(spec.depth):
            rot_layer("RY")
            rot_layer("RZ")
            gates.extend(Gate("CZ", pair) for pair in even)
            rot_layer("RY")
            rot_layer("RZ")
            gates.extend(Gate("CZ", pair) for pair in odd)
    circuit = Circuit(n, tuple(gates), slot)
    assert slot == spec.num_params()
    return circuit


def bulk_embed(circuit: Circuit, total_qubits: int, edge_value: int) -> Circuit:
    """Lift a bulk circuit onto a chain whose two edge qubits stay untouched.

    The inner circuit lands on qubits 1..total_qubits-2; the edges are
    prepared once with X gates when edge_value is 1 and never acted on again.
    """
    if circuit.num_qubits != total_qubits - 2:
        raise ValueError(f"bulk circuit has {circuit.num_qubits} qubits, "
                         f"expected {total_qubits - 2}")
    if edge_value not in (0, 1):
        raise ValueError("edge_value must be 0 or 1")
    gates: list[Gate] = []
    if edge_value == 1:
        gates.append(Gate("X", (0,)))
        gates.append(Gate("X", (total_qubits - 1,)))
    for g in circuit.gates:
        gates.append(Gate(g.kind, tuple(t + 1 for t in g.targets),
                          g.param_slot))
    return Circuit(total_qubits, tuple(gates), circuit.num_params)


def format_circuit(circuit: Circuit) -> str:
    """One gate per line: `RY q3 slot17`, `CZ q3 q4`, `X q0`."""
    lines = []
    for g in circuit.gates:
        toks = [g.kind] + [f"q{t}" for t in g.targets]
        if g.param_slot is not None:
            toks.append(f"slot{g.param_slot}")
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"
