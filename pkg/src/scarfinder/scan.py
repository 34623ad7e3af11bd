"""Experiment drivers: energy scans, cost-weight sweeps, ansatz comparisons.

energy_scan trains one circuit per (target energy, seed) over a grid spanning
the sector spectrum and records, per run, the final cost, its capped inverse,
<H>, the symmetry penalty, and the four highest fidelities against the sector
eigenstates, plus a best-over-seeds aggregation per grid point. pareto_sweep
walks the (a, b, c) weight simplex at a fixed target; ansatz_comparison and
infidelity_baseline wrap energy_scan and the two training costs for the
circuit-family and depth studies.

Randomness: every run's seed is base_seed + job index, where jobs enumerate
(point, replica) row-major. Identical configs therefore give bitwise identical
records, any single point can be re-run in isolation, and execution order
(including parallel workers) cannot change the output, which is always written
in grid order. Wall-times are kept out of the JSON-lines output so reruns stay
byte-identical; they go to a separate *_times.csv sidecar.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from time import perf_counter
from typing import Optional, Union

import numpy as np

from .ansatz import AnsatzSpec, Circuit, build_ansatz, bulk_embed
from .exactdiag import DIM_GUARD, SpectrumResult, diagonalize, fidelity_spectrum
from .operators import (H1Params, H2Params, SectorSpec, build_h1, build_h2,
                        scar_state_h1, symmetry_operator)
from .statevector import Statevector, zero_state
from .vqe import CostConfig, TrainConfig, train, train_fidelity

INVERSE_CAP = 1e15
PAPER_WEIGHTS = (0.05, 0.25, 0.70)
SCHEMA_VERSION = 1

ModelParams = Union[H1Params, H2Params]


# -------------------- configuration --------------------

@dataclass(frozen=True)
class EnergyGrid:
    """Inclusive target-energy grid {min, max, step}."""

    min_energy: float
    max_energy: float
    step: float

    def __post_init__(self):
        if not (self.step > 0):
            raise ValueError("step must be > 0")
        if self.max_energy < self.min_energy:
            raise ValueError("max_energy must be >= min_energy")

    def points(self) -> np.ndarray:
        span = self.max_energy - self.min_energy
        count = int(np.floor(span / self.step + 1e-9)) + 1
        return self.min_energy + self.step * np.arange(count)

    def echo(self) -> dict:
        return {"min": self.min_energy, "max": self.max_energy,
                "step": self.step}


def default_grid(spectrum: SpectrumResult, num_points: int = 41) -> EnergyGrid:
    """Grid spanning the spectrum's eigenvalue range with num_points points."""
    lo = float(spectrum.eigenvalues[0])
    hi = float(spectrum.eigenvalues[-1])
    return EnergyGrid(lo, hi, (hi - lo) / (num_points - 1))


@dataclass(frozen=True)
class ScanConfig:
    """One energy scan: model + sector, ansatz, trainer, grid, and weights.

    grid=None derives the default 41-point grid from the sector spectrum.
    The circuit input is |0...0>; H2 ansatze are bulk circuits lifted onto the
    chain with the edge qubits prepared per the sector's edge_config.
    """

    name: str
    params: ModelParams
    sector: SectorSpec
    ansatz: AnsatzSpec
    train: TrainConfig
    weights: tuple[float, float, float] = PAPER_WEIGHTS
    grid: Optional[EnergyGrid] = None
    grid_points: int = 41
    seeds_per_point: int = 3
    base_seed: int = 0

    def __post_init__(self):
        model = "H1" if isinstance(self.params, H1Params) else "H2"
        if self.sector.model != model:
            raise ValueError(f"sector is for {self.sector.model}, "
                             f"params are for {model}")
        n = self.params.num_sites
        want = n if model == "H1" else n - 2
        if self.ansatz.num_qubits != want:
            raise ValueError(f"ansatz acts on {self.ansatz.num_qubits} qubits,"
                             f" expected {want} for {model} at N={n}")
        if self.seeds_per_point < 1:
            raise ValueError("seeds_per_point must be >= 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        object.__setattr__(self, "weights",
                           tuple(float(w) for w in self.weights))

    @property
    def model(self) -> str:
        return "H1" if isinstance(self.params, H1Params) else "H2"


def _params_echo(params: ModelParams) -> dict:
    if isinstance(params, H1Params):
        return {"num_sites": params.num_sites, "alpha": params.alpha,
                "disorder_strength": params.disorder_strength,
                "rng_seed": params.rng_seed,
                "site_offsets": list(params.site_offsets)}
    return {"num_sites": params.num_sites, "lam": params.lam,
            "delta": params.delta, "coupling": params.coupling}


def _sector_echo(sector: SectorSpec) -> dict:
    return {"model": sector.model, "quantum_number": sector.quantum_number,
            "edge_config": sector.edge_config}


def _ansatz_echo(spec: AnsatzSpec) -> dict:
    return {"kind": spec.kind, "num_qubits": spec.num_qubits,
            "depth": spec.depth, "num_params": spec.num_params()}


def assemble_circuit(ansatz: AnsatzSpec, params: ModelParams,
                     sector: SectorSpec) -> Circuit:
    """Build the scan circuit: bare for H1, bulk-embedded for H2."""
    inner = build_ansatz(ansatz)
    if isinstance(params, H1Params):
        return inner
    edge = 0 if sector.edge_config == "all-zero" else 1
    return bulk_embed(inner, params.num_sites, edge)


def build_model(params: ModelParams):
    return build_h1(params) if isinstance(params, H1Params) else \
        build_h2(params)


# -------------------- records --------------------

@dataclass
class ScanRecord:
    """One (target energy, seed) training run.

    wall_time_s is measurement metadata and stays out of to_json_dict so that
    seed-identical reruns serialize byte-identically.
    """

    experiment: str
    point_index: int
    seed_index: int
    seed: int
    target_energy: float
    final_cost: float
    inverse_cost: float
    capped: bool
    energy: float
    variance: float
    f_symm: float
    top_fidelities: Optional[list[dict]]
    final_params: list[float]
    aborted: bool
    error: Optional[str]
    provenance: dict
    wall_time_s: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "point_index": self.point_index,
            "seed_index": self.seed_index,
            "seed": self.seed,
            "target_energy": self.target_energy,
            "final_cost": self.final_cost,
            "inverse_cost": self.inverse_cost,
            "capped": self.capped,
            "energy": self.energy,
            "variance": self.variance,
            "f_symm": self.f_symm,
            "top_fidelities": self.top_fidelities,
            "final_params": self.final_params,
            "aborted": self.aborted,
            "error": self.error,
            "provenance": self.provenance,
        }


@dataclass
class PointSummary:
    """Best-over-seeds aggregation (pointwise max of 1/C) for one grid point."""

    point_index: int
    target_energy: float
    best_seed: int
    best_inverse: float
    best_cost: float
    best_energy: float
    best_f_symm: float
    top_fidelities: Optional[list[dict]]


@dataclass
class ScanResult:
    records: list[ScanRecord]
    summaries: list[PointSummary]
    provenance: dict
    fidelities_available: bool


def capped_inverse(cost: float) -> tuple[float, bool]:
    """1/C with C < 1/INVERSE_CAP reported as capped."""
    c = max(float(cost), 0.0)
    if c < 1.0 / INVERSE_CAP:
        return INVERSE_CAP, True
    return min(1.0 / c, INVERSE_CAP), False


def _top_to_json(top: list[tuple[int, float, float]]) -> list[dict]:
    return [{"state_index": int(i), "energy": float(e), "fidelity": float(f)}
            for i, e, f in top]


# -------------------- the scan driver --------------------

def _run_point(job: tuple) -> dict:
    """Train one (target, seed) job; returns plain arrays for reassembly."""
    circuit, ccfg, tcfg = job
    t0 = perf_counter()
    try:
        rec = train(circuit, ccfg, tcfg, zero_state(ccfg.hamiltonian.num_qubits))
        return {
            "wall": perf_counter() - t0,
            "aborted": rec.aborted,
            "error": None,
            "final_cost": float(rec.costs[-1]),
            "energy": float(rec.energies[-1]),
            "variance": float(rec.variances[-1]),
            "f_symm": float(rec.symm_penalties[-1]),
            "params": np.asarray(rec.params, dtype=float),
            "state": np.asarray(rec.state.amplitudes),
        }
    except Exception as exc:  # recorded per point, not fatal to the scan
        return {"wall": perf_counter() - t0, "aborted": True,
                "error": f"{type(exc).__name__}: {exc}", "final_cost": None,
                "energy": None, "variance": None, "f_symm": None,
                "params": None, "state": None}


def _collect(jobs, workers, progress):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            it = pool.map(_run_point, jobs, chunksize=1)
            outs = []
            for out in it:
                outs.append(out)
                if progress is not None:
                    progress(len(outs), len(jobs))
    else:
        outs = []
        for job in jobs:
            outs.append(_run_point(job))
            if progress is not None:
                progress(len(outs), len(jobs))
    return outs


def energy_scan(cfg: ScanConfig, workers: int = 1,
                progress=None) -> ScanResult:
    """Run the grid of (target energy, seed) trainings for one model.

    The sector is diagonalized once; its spectrum provides the default grid
    range and the per-run top-4 fidelity columns. Above the dense-ED guard the
    fidelity columns are dropped (fidelities_available False) and an explicit
    grid is required. Jobs carry pre-assigned seeds, so workers > 1 changes
    wall time only, never the records. progress, if given, is called as
    progress(done, total) after every finished job.
    """
    h = build_model(cfg.params)
    n = cfg.params.num_sites
    symm = symmetry_operator(cfg.sector, n)
    circuit = assemble_circuit(cfg.ansatz, cfg.params, cfg.sector)

    spectrum = None
    if 2 ** n <= DIM_GUARD:
        spectrum = diagonalize(h, cfg.sector)
    if cfg.grid is not None:
        grid = cfg.grid
    elif spectrum is not None:
        grid = default_grid(spectrum, cfg.grid_points)
    else:
        raise ValueError("no dense ED at this size: give an explicit grid")
    targets = grid.points()

    provenance = {
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.name,
        "model": cfg.model,
        "model_params": _params_echo(cfg.params),
        "sector": _sector_echo(cfg.sector),
        "ansatz": _ansatz_echo(cfg.ansatz),
        "train": cfg.train.echo(),
        "weights": list(cfg.weights),
        "grid": grid.echo(),
        "seeds_per_point": cfg.seeds_per_point,
        "base_seed": cfg.base_seed,
    }

    a, b, c = cfg.weights
    jobs = []
    for i, target in enumerate(targets):
        ccfg = CostConfig(a, b, c, float(target), h, symm,
                          float(cfg.sector.quantum_number))
        for r in range(cfg.seeds_per_point):
            seed = cfg.base_seed + i * cfg.seeds_per_point + r
            jobs.append((circuit, ccfg, replace(cfg.train, rng_seed=seed)))

    outs = _collect(jobs, workers, progress)

    records = []
    for j, out in enumerate(outs):
        i, r = divmod(j, cfg.seeds_per_point)
        top = None
        if (spectrum is not None and out["state"] is not None
                and np.all(np.isfinite(out["state"]))):
            fs = fidelity_spectrum(Statevector(n, out["state"]), spectrum)
            top = _top_to_json(fs.top(4))
        if out["final_cost"] is None:
            inverse, capped = None, False
        else:
            inverse, capped = capped_inverse(out["final_cost"])
        records.append(ScanRecord(
            experiment=cfg.name, point_index=i, seed_index=r,
            seed=cfg.base_seed + j, target_energy=float(targets[i]),
            final_cost=out["final_cost"], inverse_cost=inverse, capped=capped,
            energy=out["energy"], variance=out["variance"],
            f_symm=out["f_symm"], top_fidelities=top,
            final_params=(None if out["params"] is None
                          else [float(x) for x in out["params"]]),
            aborted=out["aborted"], error=out["error"],
            provenance=provenance, wall_time_s=out["wall"]))

    summaries = []
    for i in range(len(targets)):
        group = records[i * cfg.seeds_per_point:(i + 1) * cfg.seeds_per_point]
        ok = [rec for rec in group if rec.inverse_cost is not None]
        if not ok:
            continue
        best = max(ok, key=lambda rec: rec.inverse_cost)
        summaries.append(PointSummary(
            point_index=i, target_energy=float(targets[i]),
            best_seed=best.seed, best_inverse=best.inverse_cost,
            best_cost=best.final_cost, best_energy=best.energy,
            best_f_symm=best.f_symm, top_fidelities=best.top_fidelities))

    return ScanResult(records, summaries, provenance,
                      fidelities_available=spectrum is not None)


# -------------------- weight-simplex sweep --------------------

@dataclass
class SweepRecord:
    """One (a, b, c) simplex point at a fixed target energy."""

    experiment: str
    point_index: int
    seed: int
    weight_a: float
    weight_b: float
    weight_c: float
    final_cost: float
    inverse_cost: float
    capped: bool
    energy: float
    f_symm: float
    fidelity: Optional[float]
    aborted: bool
    error: Optional[str]
    provenance: dict
    wall_time_s: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "point_index": self.point_index,
            "seed": self.seed,
            "weight_a": self.weight_a,
            "weight_b": self.weight_b,
            "weight_c": self.weight_c,
            "final_cost": self.final_cost,
            "inverse_cost": self.inverse_cost,
            "capped": self.capped,
            "energy": self.energy,
            "f_symm": self.f_symm,
            "fidelity": self.fidelity,
            "aborted": self.aborted,
            "error": self.error,
            "provenance": self.provenance,
        }


@dataclass
class SweepResult:
    records: list[SweepRecord]
    provenance: dict


def simplex_weights(step: float) -> list[tuple[float, float, float]]:
    """All (a, b, c >= 0), a + b + c = 1 on a step-spaced grid; step must
    divide 1 (step 0.05 gives the 231-point triangle)."""
    levels = round(1.0 / step)
    if abs(levels * step - 1.0) > 1e-9:
        raise ValueError("step must divide 1")
    out = []
    for ia in range(levels + 1):
        for ib in range(levels + 1 - ia):
            a_w = ia * step
            b_w = ib * step
            c_w = 1.0 - a_w - b_w
            if abs(c_w) < 1e-12:
                c_w = 0.0
            out.append((a_w, b_w, c_w))
    return out


def pareto_sweep(params: ModelParams, sector: SectorSpec, ansatz: AnsatzSpec,
                 tcfg: TrainConfig, *, step: float = 0.05,
                 target_energy: float = 0.0,
                 target_state: Optional[Statevector] = None,
                 base_seed: int = 0, name: str = "pareto",
                 workers: int = 1, progress=None) -> SweepResult:
    """Train at every (a, b, c) on the weight simplex at one fixed target.

    One seed per point, seed = base_seed + point index. The fidelity column is
    |<target_state|psi>|^2 when a target state is given (e.g. the analytic
    scar). Near a = b = 0 the cost measures only the symmetry penalty, so 1/C
    is expected to hit the cap there.
    """
    h = build_model(params)
    n = params.num_sites
    symm = symmetry_operator(sector, n)
    circuit = assemble_circuit(ansatz, params, sector)
    weights = simplex_weights(step)

    provenance = {
        "schema_version": SCHEMA_VERSION,
        "experiment": name,
        "model": "H1" if isinstance(params, H1Params) else "H2",
        "model_params": _params_echo(params),
        "sector": _sector_echo(sector),
        "ansatz": _ansatz_echo(ansatz),
        "train": tcfg.echo(),
        "target_energy": target_energy,
        "simplex_step": step,
        "base_seed": base_seed,
    }

    jobs = []
    for i, (a, b, c) in enumerate(weights):
        ccfg = CostConfig(a, b, c, target_energy, h, symm,
                          float(sector.quantum_number))
        jobs.append((circuit, ccfg, replace(tcfg, rng_seed=base_seed + i)))

    outs = _collect(jobs, workers, progress)

    tgt = None if target_state is None else np.asarray(target_state.amplitudes)
    records = []
    for i, out in enumerate(outs):
        a, b, c = weights[i]
        fid = None
        if (tgt is not None and out["state"] is not None
                and np.all(np.isfinite(out["state"]))):
            fid = float(abs(np.vdot(tgt, out["state"])) ** 2)
        if out["final_cost"] is None:
            inverse, capped = None, False
        else:
            inverse, capped = capped_inverse(out["final_cost"])
        records.append(SweepRecord(
            experiment=name, point_index=i, seed=base_seed + i,
            weight_a=a, weight_b=b, weight_c=c,
            final_cost=out["final_cost"], inverse_cost=inverse, capped=capped,
            energy=out["energy"], f_symm=out["f_symm"], fidelity=fid,
            aborted=out["aborted"], error=out["error"],
            provenance=provenance, wall_time_s=out["wall"]))
    return SweepResult(records, provenance)


# -------------------- ansatz and depth studies --------------------

# circuit-family comparison protocol: (depth, iterations) per kind
COMPARISON_PROTOCOL = {"AA": (10, 5000), "NN": (10, 5000), "HE": (2, 1000)}


@dataclass
class AnsatzSummary:
    ansatz: dict
    num_params: int
    peak_energy: float
    peak_inverse: float
    peak_seed_relstd: float
    scan: ScanResult


def ansatz_comparison(params: ModelParams, sector: SectorSpec,
                      specs: list[AnsatzSpec],
                      tcfgs: Optional[list[TrainConfig]] = None, *,
                      weights: tuple[float, float, float] = PAPER_WEIGHTS,
                      grid: Optional[EnergyGrid] = None, grid_points: int = 41,
                      seeds_per_point: int = 3, base_seed: int = 0,
                      name: str = "ansatz", workers: int = 1
                      ) -> list[AnsatzSummary]:
    """energy_scan per circuit family, with peak location and seed spread.

    Without explicit train configs each spec gets the comparison protocol's
    iteration budget for its kind. peak_seed_relstd is the relative standard
    deviation of 1/C across seeds at the peak point, the noisiness statistic.
    """
    if tcfgs is None:
        tcfgs = [TrainConfig(iterations=COMPARISON_PROTOCOL[s.kind][1])
                 for s in specs]
    if len(tcfgs) != len(specs):
        raise ValueError("need one train config per ansatz spec")
    out = []
    for spec, tcfg in zip(specs, tcfgs):
        cfg = ScanConfig(name=f"{name}_{spec.kind.lower()}{spec.depth}",
                         params=params, sector=sector, ansatz=spec,
                         train=tcfg, weights=weights, grid=grid,
                         grid_points=grid_points,
                         seeds_per_point=seeds_per_point, base_seed=base_seed)
        result = energy_scan(cfg, workers=workers)
        best = max(result.summaries, key=lambda s: s.best_inverse)
        group = [r.inverse_cost for r in result.records
                 if r.point_index == best.point_index
                 and r.inverse_cost is not None]
        rel = float(np.std(group) / np.mean(group)) if len(group) > 1 else 0.0
        out.append(AnsatzSummary(
            ansatz=_ansatz_echo(spec), num_params=spec.num_params(),
            peak_energy=best.target_energy, peak_inverse=best.best_inverse,
            peak_seed_relstd=rel, scan=result))
    return out


@dataclass
class DepthRecord:
    """Learning curves at one depth for both training costs."""

    depth: int
    num_params: int
    seed: int
    agnostic_infidelity: np.ndarray
    fidelity_cost_infidelity: np.ndarray

    @property
    def final_agnostic(self) -> float:
        return float(self.agnostic_infidelity[-1])

    @property
    def final_fidelity_cost(self) -> float:
        return float(self.fidelity_cost_infidelity[-1])

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "depth": self.depth,
            "num_params": self.num_params,
            "seed": self.seed,
            "agnostic_infidelity": [float(x) for x in
                                    self.agnostic_infidelity],
            "fidelity_cost_infidelity": [float(x) for x in
                                         self.fidelity_cost_infidelity],
        }


@dataclass
class BaselineResult:
    records: list[DepthRecord]
    provenance: dict


def infidelity_baseline(params: ModelParams, sector: SectorSpec,
                        depths: list[int], tcfg: TrainConfig, *,
                        kind: str = "HE",
                        weights: tuple[float, float, float] = PAPER_WEIGHTS,
                        target_state: Optional[Statevector] = None,
                        base_seed: int = 0, name: str = "baseline"
                        ) -> BaselineResult:
    """Infidelity-vs-iteration curves per depth, for the energy-agnostic cost
    and for the direct infidelity cost C_F = 1 - |<target|psi>|^2.

    The target defaults to the analytic boson-ring scar; the target energy is
    its expectation <target|H|target>. One fixed seed (base_seed) for every
    run, so depths are compared like for like.
    """
    h = build_model(params)
    n = params.num_sites
    if target_state is None:
        if not isinstance(params, H1Params):
            raise ValueError("no analytic target for this model: "
                             "pass target_state")
        target_state = scar_state_h1(params)
    amps = np.asarray(target_state.amplitudes)
    target_energy = float(np.real(np.vdot(amps, h.apply(amps))))
    symm = symmetry_operator(sector, n)
    a, b, c = weights

    provenance = {
        "schema_version": SCHEMA_VERSION,
        "experiment": name,
        "model": "H1" if isinstance(params, H1Params) else "H2",
        "model_params": _params_echo(params),
        "sector": _sector_echo(sector),
        "kind": kind,
        "depths": list(depths),
        "train": tcfg.echo(),
        "weights": list(weights),
        "target_energy": target_energy,
        "base_seed": base_seed,
    }

    bulk = n if isinstance(params, H1Params) else n - 2
    tcfg = replace(tcfg, rng_seed=base_seed)
    records = []
    for depth in depths:
        spec = AnsatzSpec(kind, bulk, depth)
        circuit = assemble_circuit(spec, params, sector)
        ccfg = CostConfig(a, b, c, target_energy, h, symm,
                          float(sector.quantum_number))
        agn = train(circuit, ccfg, tcfg, zero_state(n),
                    probe_state=target_state)
        fid = train_fidelity(circuit, target_state, tcfg, zero_state(n))
        records.append(DepthRecord(
            depth=depth, num_params=spec.num_params(), seed=base_seed,
            agnostic_infidelity=agn.probe_infidelities,
            fidelity_cost_infidelity=fid.infidelities))
    return BaselineResult(records, provenance)


# -------------------- output files --------------------

def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _fid_columns(top: Optional[list[dict]]) -> list[str]:
    cells = []
    for slot in range(4):
        if top is not None and slot < len(top):
            cells += [repr(top[slot]["energy"]), repr(top[slot]["fidelity"])]
        else:
            cells += ["", ""]
    return cells


def write_scan_outputs(result: ScanResult, out_dir) -> dict[str, Path]:
    """JSONL of all records plus plot-ready CSV projections.

    <name>_seed<base>.jsonl   one line per (target, seed) record
    <name>_seed<base>_best.csv    best-over-seeds curve per grid point
    <name>_seed<base>_runs.csv    every run, flat columns
    <name>_seed<base>_times.csv   wall-time sidecar (not determinism-covered)
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prov = result.provenance
    stem = f"{prov['experiment']}_seed{prov['base_seed']}"
    paths = {"jsonl": out_dir / f"{stem}.jsonl",
             "best": out_dir / f"{stem}_best.csv",
             "runs": out_dir / f"{stem}_runs.csv",
             "times": out_dir / f"{stem}_times.csv"}

    with open(paths["jsonl"], "w") as fh:
        for rec in result.records:
            fh.write(_dump(rec.to_json_dict()) + "\n")

    fid_header = ["fid1_energy", "fid1", "fid2_energy", "fid2",
                  "fid3_energy", "fid3", "fid4_energy", "fid4"]
    with open(paths["best"], "w") as fh:
        fh.write(",".join(["point_index", "target_energy", "best_seed",
                           "best_inverse", "best_cost", "best_energy",
                           "best_f_symm"] + fid_header) + "\n")
        for s in result.summaries:
            row = [str(s.point_index), repr(s.target_energy),
                   str(s.best_seed), repr(s.best_inverse), repr(s.best_cost),
                   repr(s.best_energy), repr(s.best_f_symm)]
            fh.write(",".join(row + _fid_columns(s.top_fidelities)) + "\n")

    with open(paths["runs"], "w") as fh:
        fh.write(",".join(["point_index", "seed_index", "seed",
                           "target_energy", "final_cost", "inverse_cost",
                           "capped", "energy", "variance", "f_symm"]
                          + fid_header) + "\n")
        for rec in result.records:
            row = [str(rec.point_index), str(rec.seed_index), str(rec.seed),
                   repr(rec.target_energy)]
            row += ["" if v is None else repr(v) for v in
                    (rec.final_cost, rec.inverse_cost)]
            row.append(str(int(rec.capped)))
            row += ["" if v is None else repr(v) for v in
                    (rec.energy, rec.variance, rec.f_symm)]
            fh.write(",".join(row + _fid_columns(rec.top_fidelities)) + "\n")

    with open(paths["times"], "w") as fh:
        fh.write("point_index,seed,wall_time_s\n")
        for rec in result.records:
            fh.write(f"{rec.point_index},{rec.seed},{rec.wall_time_s!r}\n")
    return paths


def write_sweep_outputs(result: SweepResult, out_dir) -> dict[str, Path]:
    """JSONL plus a contour-ready CSV over the weight simplex."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prov = result.provenance
    stem = f"{prov['experiment']}_seed{prov['base_seed']}"
    paths = {"jsonl": out_dir / f"{stem}.jsonl",
             "grid": out_dir / f"{stem}_grid.csv",
             "times": out_dir / f"{stem}_times.csv"}

    with open(paths["jsonl"], "w") as fh:
        for rec in result.records:
            fh.write(_dump(rec.to_json_dict()) + "\n")

    with open(paths["grid"], "w") as fh:
        fh.write("a,b,c,final_cost,inverse_cost,capped,energy,f_symm,"
                 "fidelity\n")
        for rec in result.records:
            row = [repr(rec.weight_a), repr(rec.weight_b), repr(rec.weight_c)]
            row += ["" if v is None else repr(v) for v in
                    (rec.final_cost, rec.inverse_cost)]
            row.append(str(int(rec.capped)))
            row += ["" if v is None else repr(v) for v in
                    (rec.energy, rec.f_symm, rec.fidelity)]
            fh.write(",".join(row) + "\n")

    with open(paths["times"], "w") as fh:
        fh.write("point_index,seed,wall_time_s\n")
        for rec in result.records:
            fh.write(f"{rec.point_index},{rec.seed},{rec.wall_time_s!r}\n")
    return paths


def write_baseline_outputs(result: BaselineResult, out_dir) -> dict[str, Path]:
    """JSONL (one line per depth) plus long-form learning-curve CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prov = result.provenance
    stem = f"{prov['experiment']}_seed{prov['base_seed']}"
    paths = {"jsonl": out_dir / f"{stem}.jsonl",
             "curves": out_dir / f"{stem}_curves.csv"}

    with open(paths["jsonl"], "w") as fh:
        for rec in result.records:
            line = rec.to_json_dict()
            line["provenance"] = result.provenance
            fh.write(_dump(line) + "\n")

    with open(paths["curves"], "w") as fh:
        fh.write("cost,depth,iteration,infidelity\n")
        for rec in result.records:
            for series, label in ((rec.agnostic_infidelity, "agnostic"),
                                  (rec.fidelity_cost_infidelity, "fidelity")):
                for i, v in enumerate(series):
                    fh.write(f"{label},{rec.depth},{i},{float(v)!r}\n")
    return paths
