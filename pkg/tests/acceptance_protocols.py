"""Pinned paper-scale experiment protocols behind the acceptance suite.

tests/prime_acceptance.py runs these (hours of single-core compute) and
commits the outputs under tests/data/acceptance/; tests/test_acceptance.py
reads the same files back. Both sides import this module, so the protocol
constants exist in exactly one place. Every run is seeded, so regenerating the
cache reproduces it byte for byte.

frozen.json holds the regression values (peak ratios, depth factors) computed
from the first green run; freeze() rewrites it from the cached outputs.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from scarfinder.ansatz import AnsatzSpec
from scarfinder.exactdiag import diagonalize, fidelity_spectrum
from scarfinder.operators import (H1Params, H2Params, SectorSpec, build_h1,
                                  scar_state_h1)
from scarfinder.scan import (PAPER_WEIGHTS, ScanConfig, energy_scan,
                             infidelity_baseline, pareto_sweep,
                             write_baseline_outputs, write_scan_outputs,
                             write_sweep_outputs)
from scarfinder.vqe import TrainConfig

CACHE_DIR = Path(__file__).parent / "data" / "acceptance"

# One fixed disorder realization for every paper-scale boson-ring experiment.
# Chosen so that the scar's half-chain entropy (0.487) sits comfortably below
# the depth-2 hardware-efficient entanglement ceiling of 2*ln2; realizations
# whose scar entropy exceeds the ceiling cannot be represented at this depth.
H1_SITES = 12
H1_ALPHA = -2.5
H1_DELTA = 0.5
H1_REALIZATION = 4

H2_SITES = 14
H2_LAM = 1.0
H2_DELTA = 0.1
H2_COUPLING = 1.0

SCAN_ITERATIONS = 1000
PARETO_ITERATIONS = 500
BASELINE_ITERATIONS = 5000
BASELINE_DEPTHS = (1, 2, 4)

# circuit family per domain-wall sector: shallow all-to-all suffices low in
# the tower, deeper nearest-neighbour for the entangled upper sectors
H2_ANSATZ = {4: ("AA", 5), 6: ("AA", 5), 8: ("NN", 10), 10: ("NN", 10)}


def h1_params(alpha: float = H1_ALPHA) -> H1Params:
    return H1Params.draw(H1_SITES, alpha, H1_DELTA, H1_REALIZATION)


def h2_params() -> H2Params:
    return H2Params(H2_SITES, H2_LAM, H2_DELTA, H2_COUPLING)


def h1_scan_config(scarred: bool) -> ScanConfig:
    name = "h1_scarred" if scarred else "h1_scarless"
    return ScanConfig(
        name=name,
        params=h1_params(H1_ALPHA if scarred else 0.0),
        sector=SectorSpec("H1", H1_SITES // 2),
        ansatz=AnsatzSpec("HE", H1_SITES, 2),
        train=TrainConfig(iterations=SCAN_ITERATIONS),
        weights=PAPER_WEIGHTS)


def h2_scan_config(num_walls: int) -> ScanConfig:
    kind, depth = H2_ANSATZ[num_walls]
    return ScanConfig(
        name=f"h2_ndw{num_walls}",
        params=h2_params(),
        sector=SectorSpec("H2", num_walls, "all-zero"),
        ansatz=AnsatzSpec(kind, H2_SITES - 2, depth),
        train=TrainConfig(iterations=SCAN_ITERATIONS),
        weights=PAPER_WEIGHTS)


def run_h1_scan(out_dir, scarred: bool, progress=None):
    result = energy_scan(h1_scan_config(scarred), progress=progress)
    return write_scan_outputs(result, out_dir)


def run_h2_scan(out_dir, num_walls: int, progress=None):
    result = energy_scan(h2_scan_config(num_walls), progress=progress)
    return write_scan_outputs(result, out_dir)


def run_pareto(out_dir, progress=None):
    params = h1_params()
    result = pareto_sweep(
        params, SectorSpec("H1", H1_SITES // 2),
        AnsatzSpec("HE", H1_SITES, 1),
        TrainConfig(iterations=PARETO_ITERATIONS),
        step=0.05, target_energy=0.0, target_state=scar_state_h1(params),
        name="pareto_h1", progress=progress)
    return write_sweep_outputs(result, out_dir)


def run_baseline(out_dir, progress=None):
    params = h1_params()
    result = infidelity_baseline(
        params, SectorSpec("H1", H1_SITES // 2), list(BASELINE_DEPTHS),
        TrainConfig(iterations=BASELINE_ITERATIONS), kind="HE",
        weights=PAPER_WEIGHTS, name="depth_h1")
    return write_baseline_outputs(result, out_dir)


# stage name -> (runner, output stem); ordered longest first
STAGES = {
    "h1_scarred": (lambda out, progress=None: run_h1_scan(out, True, progress),
                   "h1_scarred_seed0"),
    "h1_scarless": (lambda out, progress=None: run_h1_scan(out, False,
                                                           progress),
                    "h1_scarless_seed0"),
    "h2_ndw8": (lambda out, progress=None: run_h2_scan(out, 8, progress),
                "h2_ndw8_seed0"),
    "h2_ndw10": (lambda out, progress=None: run_h2_scan(out, 10, progress),
                 "h2_ndw10_seed0"),
    "h2_ndw4": (lambda out, progress=None: run_h2_scan(out, 4, progress),
                "h2_ndw4_seed0"),
    "h2_ndw6": (lambda out, progress=None: run_h2_scan(out, 6, progress),
                "h2_ndw6_seed0"),
    "pareto_h1": (run_pareto, "pareto_h1_seed0"),
    "depth_h1": (run_baseline, "depth_h1_seed0"),
}


def load_jsonl(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def best_curve(records: list[dict]) -> list[dict]:
    """Best-over-seeds record per grid point, in grid order."""
    by_point: dict[int, dict] = {}
    for rec in records:
        if rec["inverse_cost"] is None:
            continue
        cur = by_point.get(rec["point_index"])
        if cur is None or rec["inverse_cost"] > cur["inverse_cost"]:
            by_point[rec["point_index"]] = rec
    return [by_point[i] for i in sorted(by_point)]


def h1_scar_location(params: H1Params) -> tuple[int, float]:
    """Sector-ED index and energy of the analytic boson-ring scar."""
    spectrum = diagonalize(build_h1(params),
                           SectorSpec("H1", params.num_sites // 2))
    fs = fidelity_spectrum(scar_state_h1(params), spectrum)
    i = int(np.argmax(fs.fidelities))
    return i, float(spectrum.eigenvalues[i])


def _scan_freeze(records: list[dict]) -> dict:
    best = best_curve(records)
    inverses = np.array([r["inverse_cost"] for r in best])
    peak = int(np.argmax(inverses))
    return {
        "peak_target_energy": best[peak]["target_energy"],
        "peak_inverse": float(inverses[peak]),
        "peak_ratio": float(inverses.max() / np.median(inverses)),
        "peak_top_fidelity": best[peak]["top_fidelities"][0],
    }


def freeze(out_dir=CACHE_DIR) -> dict:
    """Recompute frozen.json's regression values from the cached outputs."""
    out_dir = Path(out_dir)
    frozen: dict = {}

    for name in ("h1_scarred", "h1_scarless"):
        frozen[name] = _scan_freeze(load_jsonl(out_dir / f"{name}_seed0.jsonl"))
    scar_index, scar_energy = h1_scar_location(h1_params())
    frozen["h1_scar"] = {"state_index": scar_index, "energy": scar_energy}
    frozen["peak_ratio_contrast"] = (frozen["h1_scarred"]["peak_ratio"]
                                     / frozen["h1_scarless"]["peak_ratio"])

    for ndw in sorted(H2_ANSATZ):
        name = f"h2_ndw{ndw}"
        frozen[name] = _scan_freeze(load_jsonl(out_dir / f"{name}_seed0.jsonl"))

    records = load_jsonl(out_dir / "pareto_h1_seed0.jsonl")
    fids = np.array([-1.0 if r["fidelity"] is None else r["fidelity"]
                     for r in records])
    paper = [r for r in records
             if (abs(r["weight_a"] - PAPER_WEIGHTS[0]) < 1e-9
                 and abs(r["weight_b"] - PAPER_WEIGHTS[1]) < 1e-9)]
    assert len(paper) == 1
    rank = int(np.sum(fids > paper[0]["fidelity"]))
    frozen["pareto_h1"] = {
        "paper_point_fidelity": paper[0]["fidelity"],
        "paper_point_rank": rank,
        "num_capped": int(sum(r["capped"] for r in records)),
        "best_fidelity": float(fids.max()),
    }

    depth = load_jsonl(out_dir / "depth_h1_seed0.jsonl")
    by_depth = {r["depth"]: r for r in depth}
    finals = {
        str(d): {"agnostic": by_depth[d]["agnostic_infidelity"][-1],
                 "fidelity_cost": by_depth[d]["fidelity_cost_infidelity"][-1]}
        for d in sorted(by_depth)}
    d4 = finals[str(BASELINE_DEPTHS[-1])]
    frozen["depth_h1"] = {
        "finals": finals,
        "depth4_factor": d4["agnostic"] / d4["fidelity_cost"],
    }

    path = out_dir / "frozen.json"
    with open(path, "w") as fh:
        json.dump(frozen, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return frozen
