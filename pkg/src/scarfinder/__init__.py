"""Variational hunts for quantum many-body scar eigenstates.

The package builds two benchmark models that host exact mid-spectrum scars
(a disordered hard-core-boson ring and a domain-wall-conserving spin chain),
trains shallow parametric circuits against an energy-targeted cost that
rewards small variance and the right symmetry sector, and provides the
exact-diagonalization, scanning, and quench-dynamics tooling used to verify
that the optimizer really lands on the scar.

Typical entry points: operators.build_h1/build_h2 and the analytic scar
constructors; ansatz.build_ansatz; vqe.train; scan.energy_scan and
pareto_sweep; dynamics.revival_trace; the `scarfinder` command line.
"""

__version__ = "0.1.0"

from .ansatz import AnsatzSpec, Circuit, build_ansatz
from .operators import (H1Params, H2Params, PauliOperator, SectorSpec,
                        build_h1, build_h2, scar_state_h1, scar_tower_h2,
                        symmetry_operator)
from .statevector import (BipartitionSpec, Statevector, entanglement_entropy,
                          inner_product, zero_state)
from .vqe import CostConfig, RunRecord, TrainConfig, cost, gradient, train

__all__ = [
    "AnsatzSpec", "BipartitionSpec", "Circuit", "CostConfig", "H1Params",
    "H2Params", "PauliOperator", "RunRecord", "SectorSpec", "Statevector",
    "TrainConfig", "build_ansatz", "build_h1", "build_h2", "cost",
    "entanglement_entropy", "gradient", "inner_product", "scar_state_h1",
    "scar_tower_h2", "symmetry_operator", "train", "zero_state",
]
