"""Command-line front end: scar validation, training, scans, and dynamics.

Subcommands map one-to-one onto the library's experiment drivers:

  diag           diagonalize a model sector, export the spectrum CSV
  validate-scar  build the analytic scar states and check them against ED
  train          one variational optimization, full trace to JSON
  scan           target-energy grid scan (energy_scan), JSONL + CSV
  sweep          cost-weight simplex sweep (pareto_sweep), JSONL + CSV
  dynamics       quench trajectory F(t), S(t), <H> to CSV

Every experiment is described by a flat key=value config file (`#` starts a
comment). Keys not in the subcommand's schema are rejected before any
computation, as are values of the wrong type. Command-line flags --seed,
--out, --workers and --scale override or complement the file. --scale picks
the default model size: `paper` reproduces the published protocol sizes
(N=12 ring, N=14 chain), `desk` is a fast small-size variant (N=8/10) with
the same structure. Bundled configs under scarfinder/configs cover both
scales; a --config value without a path separator that is not a local file
is looked up there, so `scarfinder scan --config h1_scarred.cfg` works from
anywhere.

Exit codes: 0 success, 1 computation or validation failure, 2 config error.
Failures also leave a machine-readable `<command>_error.json` in the output
directory. Every JSON output embeds the fully resolved configuration; CSV
files are plot-ready projections of a JSON/JSONL sibling.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .ansatz import ANSATZ_KINDS, AnsatzSpec
from .dynamics import (EvolutionPlan, RevivalTrace, haar_entropy_band,
                       random_fock_state, revival_trace, write_trajectory_csv)
from .exactdiag import (detect_scars, diagonalize, eigenstate_entropies,
                        export_spectrum_csv)
from .operators import (H1Params, H2Params, SectorSpec, build_h1, build_h2,
                        scar_state_h1, scar_tower_h2, symmetry_operator)
from .scan import (ScanConfig, assemble_circuit, build_model, energy_scan,
                   pareto_sweep, write_scan_outputs, write_sweep_outputs)
from .statevector import (BipartitionSpec, Statevector, expectation,
                          inner_product, load_statevector, save_statevector,
                          zero_state)
from .vqe import CostConfig, TrainConfig, cost, train

RESIDUAL_TOLERANCE = 1e-8


class ConfigError(Exception):
    """Schema violation: malformed line, unknown key, or bad value."""


# -------------------- config schema --------------------

def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_enum(*choices: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in choices:
            raise ValueError(f"must be one of {', '.join(choices)}")
        return text
    return parse


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], object]
    default: object  # callable(resolved) -> value for scale-aware defaults


MODEL_FIELDS = {
    "model": Field(_parse_enum("H1", "H2"), "H1"),
    "num_sites": Field(int, None),  # scale-dependent, filled in _resolve
    "sector": Field(int, None),
    "alpha": Field(float, -2.5),
    "disorder_strength": Field(float, 0.5),
    "realization": Field(int, None),
    "lam": Field(float, 1.0),
    "delta": Field(float, 0.1),
    "coupling": Field(float, 1.0),
    "edge_config": Field(_parse_enum("all-zero", "all-one"), "all-zero"),
}

ANSATZ_FIELDS = {
    "ansatz": Field(_parse_enum(*ANSATZ_KINDS), "HE"),
    "depth": Field(int, 2),
}

TRAIN_FIELDS = {
    "iterations": Field(int, 1000),
    "learning_rate": Field(float, 0.01),
    "init_epsilon": Field(float, 0.01),
    "adam_beta1": Field(float, 0.9),
    "adam_beta2": Field(float, 0.999),
    "adam_eps": Field(float, 1e-8),
}

COST_FIELDS = {
    "weight_a": Field(float, 0.05),
    "weight_b": Field(float, 0.25),
    "weight_c": Field(float, 0.70),
    "target_energy": Field(float, 0.0),
}

NAME_FIELD = {"name": Field(str, None)}  # default: the command name

SCHEMAS: dict[str, dict[str, Field]] = {
    "diag": {**MODEL_FIELDS, **NAME_FIELD,
             "probe": Field(_parse_enum("none", "scar"), "none"),
             "tower_k": Field(int, 0)},
    "validate-scar": {**MODEL_FIELDS, **NAME_FIELD},
    "train": {**MODEL_FIELDS, **ANSATZ_FIELDS, **TRAIN_FIELDS, **COST_FIELDS,
              **NAME_FIELD,
              "rng_seed": Field(int, 0),
              "save_state": Field(_parse_bool, False)},
    "scan": {**MODEL_FIELDS, **ANSATZ_FIELDS, **TRAIN_FIELDS, **COST_FIELDS,
             **NAME_FIELD,
             "grid_points": Field(int, 41),
             "seeds_per_point": Field(int, 3),
             "base_seed": Field(int, 0)},
    "sweep": {**MODEL_FIELDS, **ANSATZ_FIELDS, **TRAIN_FIELDS, **NAME_FIELD,
              "target_energy": Field(float, 0.0),
              "simplex_step": Field(float, 0.05),
              "base_seed": Field(int, 0)},
    "dynamics": {**MODEL_FIELDS, **NAME_FIELD,
                 "initial": Field(_parse_enum("scar", "fock", "file"),
                                  "scar"),
                 "tower_k": Field(int, 0),
                 "fock_seed": Field(int, 1),
                 "state_file": Field(str, ""),
                 "time_max": Field(float, 50.0),
                 "time_points": Field(int, 400)},
}

# target_energy is the scan grid's job, not a scan config key
del SCHEMAS["scan"]["target_energy"]

SCALE_SIZES = {  # (num_sites, realization) per model at each scale
    "paper": {"H1": (12, 4), "H2": (14, None)},
    "desk": {"H1": (8, 0), "H2": (10, None)},
}

H1_ONLY = ("alpha", "disorder_strength", "realization")
H2_ONLY = ("lam", "delta", "coupling", "edge_config")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key=value lines; `#` comments; malformed lines are errors."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, "
                              f"got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _locate_config(spec: str) -> Path:
    path = Path(spec)
    if path.exists():
        return path
    if path.name == spec:  # bare name: fall back to the bundled directory
        bundled = resources.files("scarfinder") / "configs" / spec
        if bundled.is_file():
            return Path(str(bundled))
    raise ConfigError(f"config file not found: {spec}")


def resolve_config(command: str, raw: dict[str, str],
                   scale: str, seed: Optional[int]) -> dict:
    """Validate raw strings against the schema and fill scale defaults."""
    schema = SCHEMAS[command]
    for key in raw:
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for command {command}")
    resolved: dict = {}
    for key, field in schema.items():
        if key in raw:
            try:
                resolved[key] = field.parse(raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}") from exc
        else:
            resolved[key] = field.default

    model = resolved["model"]
    # model-specific keys must not appear for the other model
    foreign = H2_ONLY if model == "H1" else H1_ONLY
    for key in foreign:
        if key in raw:
            raise ConfigError(f"key {key!r} is not valid for model {model}")

    sites, realization = SCALE_SIZES[scale][model]
    if resolved["num_sites"] is None:
        resolved["num_sites"] = sites
    if model == "H1" and resolved["realization"] is None:
        resolved["realization"] = realization
    if resolved["sector"] is None:
        resolved["sector"] = (resolved["num_sites"] // 2 if model == "H1"
                              else 4)
    if resolved.get("name") is None:
        resolved["name"] = command.replace("-", "_")
    if seed is not None:
        for key in ("base_seed", "rng_seed", "fock_seed"):
            if key in schema:
                resolved[key] = seed
    resolved["scale"] = scale
    return resolved


# -------------------- shared assembly --------------------

def _model_params(cfg: dict):
    if cfg["model"] == "H1":
        return H1Params.draw(cfg["num_sites"], cfg["alpha"],
                             cfg["disorder_strength"], cfg["realization"])
    return H2Params(cfg["num_sites"], cfg["lam"], cfg["delta"],
                    cfg["coupling"])


def _sector(cfg: dict) -> SectorSpec:
    if cfg["model"] == "H1":
        return SectorSpec("H1", cfg["sector"])
    return SectorSpec("H2", cfg["sector"], cfg["edge_config"])


def _ansatz(cfg: dict) -> AnsatzSpec:
    n = cfg["num_sites"] if cfg["model"] == "H1" else cfg["num_sites"] - 2
    return AnsatzSpec(cfg["ansatz"], n, cfg["depth"])


def _train_config(cfg: dict, seed_key: str) -> TrainConfig:
    return TrainConfig(iterations=cfg["iterations"],
                       learning_rate=cfg["learning_rate"],
                       adam_beta1=cfg["adam_beta1"],
                       adam_beta2=cfg["adam_beta2"],
                       adam_eps=cfg["adam_eps"],
                       init_epsilon=cfg["init_epsilon"],
                       rng_seed=cfg[seed_key])


def _scar_state(cfg: dict, params, tower_k: int = 0) -> Statevector:
    if cfg["model"] == "H1":
        return scar_state_h1(params)
    tower = "zero" if cfg["edge_config"] == "all-zero" else "one"
    return scar_tower_h2(params, tower_k, tower)


def _initial_state(cfg: dict) -> Statevector:
    """Circuit input: |0..0>, with H2 edge qubits set by the ansatz wrapper."""
    return zero_state(cfg["num_sites"])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


# -------------------- subcommands --------------------

def cmd_diag(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    sector = _sector(cfg)
    spectrum = diagonalize(build_model(params), sector)
    probe = None
    if cfg["probe"] == "scar":
        probe = _scar_state(cfg, params, cfg["tower_k"])
    stem = f"{cfg['name']}_{cfg['model']}_N{cfg['num_sites']}"
    csv_path = out / f"{stem}_spectrum.csv"
    export_spectrum_csv(spectrum, csv_path, probe=probe)
    entropies = eigenstate_entropies(spectrum)
    summary = {
        "resolved_config": cfg,
        "sector_dimension": spectrum.num_states,
        "energy_min": float(spectrum.eigenvalues[0]),
        "energy_max": float(spectrum.eigenvalues[-1]),
        "entropy_min": float(np.min(entropies)),
        "entropy_min_energy":
            float(spectrum.eigenvalues[int(np.argmin(entropies))]),
        "spectrum_csv": csv_path.name,
    }
    _write_json(out / f"{stem}_diag.json", summary)
    print(f"diag: {spectrum.num_states} states in "
          f"[{summary['energy_min']:.4f}, {summary['energy_max']:.4f}], "
          f"entropy minimum {summary['entropy_min']:.4f} at "
          f"E={summary['entropy_min_energy']:.4f}")
    return 0


def _residual_checks(cfg: dict, params, sector: SectorSpec,
                     spectrum, label: str, state: Statevector) -> dict:
    h = build_model(params)
    amps = state.amplitudes
    hpsi = h.apply(amps)
    energy = float(np.real(np.vdot(amps, hpsi)))
    residual = float(np.linalg.norm(hpsi - energy * amps))
    symm = symmetry_operator(sector, cfg["num_sites"])
    spsi = symm.apply(amps)
    symm_value = float(np.real(np.vdot(amps, spsi)))
    symm_residual = float(np.linalg.norm(spsi - symm_value * amps))
    cut = BipartitionSpec.half_chain(cfg["num_sites"])
    from .statevector import entanglement_entropy
    coeffs, _ = spectrum.project(state)
    nearest = int(np.argmax(np.abs(coeffs)))
    return {
        "label": label,
        "energy": energy,
        "eigen_residual": residual,
        "symmetry_value": symm_value,
        "symmetry_residual": symm_residual,
        "half_chain_entropy": float(entanglement_entropy(state, cut)),
        "nearest_eigenstate_index": nearest,
        "nearest_eigenstate_energy": float(spectrum.eigenvalues[nearest]),
        "nearest_eigenstate_fidelity": float(np.abs(coeffs[nearest]) ** 2),
    }


def cmd_validate_scar(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    checks: list[dict] = []
    if cfg["model"] == "H1":
        sector = _sector(cfg)
        spectrum = diagonalize(build_model(params), sector)
        checks.append(_residual_checks(cfg, params, sector, spectrum,
                                       "scar", scar_state_h1(params)))
        flagged = detect_scars(spectrum)
        detection = {"flagged_count": len(flagged),
                     "flagged_indices": [int(i) for i in flagged]}
    else:
        n = cfg["num_sites"]
        detection = None
        for tower, edge in (("zero", "all-zero"), ("one", "all-one")):
            for k in range(n // 2):
                sector = SectorSpec("H2", 2 * k, edge)
                spectrum = diagonalize(build_model(params), sector)
                checks.append(_residual_checks(
                    cfg, params, sector, spectrum,
                    f"tower_{tower}_k{k}", scar_tower_h2(params, k, tower)))
    failures = [c for c in checks
                if c["eigen_residual"] > RESIDUAL_TOLERANCE
                or c["symmetry_residual"] > RESIDUAL_TOLERANCE]
    report = {"resolved_config": cfg, "checks": checks,
              "detection": detection,
              "tolerance": RESIDUAL_TOLERANCE,
              "passed": not failures}
    stem = f"{cfg['name']}_{cfg['model']}_N{cfg['num_sites']}"
    _write_json(out / f"{stem}_report.json", report)
    worst = max(c["eigen_residual"] for c in checks)
    if failures:
        first = failures[0]
        print(f"validate-scar: FAIL {first['label']} eigen_residual="
              f"{first['eigen_residual']:.3e} (tolerance {RESIDUAL_TOLERANCE:g})")
        return 1
    extra = ""
    if detection is not None:
        extra = f", {detection['flagged_count']} low-entropy state(s) flagged"
    print(f"validate-scar: OK {len(checks)} state(s), worst residual "
          f"{worst:.3e}{extra}")
    return 0


def cmd_train(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    sector = _sector(cfg)
    h = build_model(params)
    symm = symmetry_operator(sector, cfg["num_sites"])
    circuit = assemble_circuit(_ansatz(cfg), params, sector)
    ccfg = CostConfig(cfg["weight_a"], cfg["weight_b"], cfg["weight_c"],
                      cfg["target_energy"], h, symm, float(cfg["sector"]))
    record = train(circuit, ccfg, _train_config(cfg, "rng_seed"),
                   _initial_state(cfg))
    scar = _scar_state(cfg, params)
    fidelity = float(abs(inner_product(scar, record.state)) ** 2)
    stem = f"{cfg['name']}_seed{cfg['rng_seed']}"
    payload = {"resolved_config": cfg, "scar_fidelity": fidelity,
               **record.to_json_dict()}
    _write_json(out / f"{stem}_run.json", payload)
    if cfg["save_state"]:
        save_statevector(record.state, out / f"{stem}_state.json")
    print(f"train: final cost {record.costs[-1]:.6e}, "
          f"<H> {record.energies[-1]:+.4f}, scar fidelity {fidelity:.4f}")
    return 0


def cmd_scan(cfg: dict, out: Path, workers: int) -> int:
    scan_cfg = ScanConfig(
        name=cfg["name"], params=_model_params(cfg), sector=_sector(cfg),
        ansatz=_ansatz(cfg), train=_train_config(cfg, "base_seed"),
        weights=(cfg["weight_a"], cfg["weight_b"], cfg["weight_c"]),
        grid_points=cfg["grid_points"],
        seeds_per_point=cfg["seeds_per_point"], base_seed=cfg["base_seed"])
    result = energy_scan(scan_cfg, workers=workers)
    result.provenance["resolved_config"] = cfg
    paths = write_scan_outputs(result, out)
    best = max(result.summaries, key=lambda s: s.best_inverse)
    line = (f"scan: peak 1/C {best.best_inverse:.4e} at "
            f"E={best.target_energy:.4f} (point {best.point_index})")
    if result.fidelities_available and best.top_fidelities:
        top = best.top_fidelities[0]
        line += (f", top fidelity {top['fidelity']:.4f} with state at "
                 f"E={top['energy']:.4f}")
    print(line + f" -> {paths['jsonl'].name}")
    return 0


def cmd_sweep(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    target = _scar_state(cfg, params) if cfg["model"] == "H1" else None
    result = pareto_sweep(
        params, _sector(cfg), _ansatz(cfg), _train_config(cfg, "base_seed"),
        step=cfg["simplex_step"], target_energy=cfg["target_energy"],
        target_state=target, base_seed=cfg["base_seed"], name=cfg["name"],
        workers=workers)
    result.provenance["resolved_config"] = cfg
    paths = write_sweep_outputs(result, out)
    capped = sum(1 for r in result.records if r.capped)
    best = max(result.records,
               key=lambda r: -1.0 if r.fidelity is None else r.fidelity)
    line = (f"sweep: {len(result.records)} weight points, {capped} capped")
    if best.fidelity is not None:
        line += (f", best fidelity {best.fidelity:.4f} at "
                 f"(a,b,c)=({best.weight_a:.2f},{best.weight_b:.2f},"
                 f"{best.weight_c:.2f})")
    print(line + f" -> {paths['jsonl'].name}")
    return 0


def cmd_dynamics(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    sector = _sector(cfg)
    spectrum = diagonalize(build_model(params), sector)
    if cfg["initial"] == "scar":
        initial = _scar_state(cfg, params, cfg["tower_k"])
    elif cfg["initial"] == "fock":
        initial = random_fock_state(sector, cfg["num_sites"],
                                    cfg["fock_seed"])
    else:
        if not cfg["state_file"]:
            raise ConfigError("initial=file requires state_file")
        initial = load_statevector(cfg["state_file"])
    times = np.linspace(0.0, cfg["time_max"], cfg["time_points"])
    cut = BipartitionSpec.half_chain(cfg["num_sites"])
    trace = revival_trace(EvolutionPlan(spectrum, initial, times), cut)
    band_mean, band_std = haar_entropy_band(sector, cfg["num_sites"], cut)
    stem = f"{cfg['name']}_{cfg['initial']}"
    csv_path = out / f"{stem}_trajectory.csv"
    write_trajectory_csv(trace, csv_path)
    summary = {
        "resolved_config": cfg,
        "energy": float(trace.energies[0]),
        "late_time_mean_fidelity": trace.late_time_mean_fidelity(),
        "final_entropy": float(trace.entropies[-1]),
        "haar_entropy_mean": band_mean,
        "haar_entropy_std": band_std,
        "trajectory_csv": csv_path.name,
    }
    _write_json(out / f"{stem}_dynamics.json", summary)
    print(f"dynamics: late-time mean F "
          f"{summary['late_time_mean_fidelity']:.4f}, final S "
          f"{summary['final_entropy']:.4f} (Haar {band_mean:.4f}"
          f"+-{band_std:.4f}) -> {csv_path.name}")
    return 0


COMMANDS = {
    "diag": cmd_diag,
    "validate-scar": cmd_validate_scar,
    "train": cmd_train,
    "scan": cmd_scan,
    "sweep": cmd_sweep,
    "dynamics": cmd_dynamics,
}


# -------------------- entry point --------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scarfinder",
        description="Variational hunts for quantum many-body scar states.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value experiment config; bare "
                       "names are looked up among the bundled configs")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the experiment's base/rng seed")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel trainings for scan/sweep")
        p.add_argument("--scale", choices=("paper", "desk"), default="desk",
                       help="default model sizes when the config "
                       "does not pin them")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        raw: dict[str, str] = {}
        if args.config:
            raw = parse_config_text(_locate_config(args.config).read_text())
        cfg = resolve_config(args.command, raw, args.scale, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out, max(1, args.workers))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surface module errors as records, not traces
        _write_json(out / f"{args.command}_error.json",
                    {"command": args.command, "error": str(exc),
                     "error_type": type(exc).__name__,
                     "resolved_config": cfg})
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
