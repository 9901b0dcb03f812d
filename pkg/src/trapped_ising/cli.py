"""Command-line front end: configuration in, CSV/JSON figure data out.

    trapped-ising geometry  --config run.toml --out out/
    trapped-ising scan      --config run.toml --mu-range 1.20:1.45:0.001
    trapped-ising evolve    --config run.toml --shots 10000 --seed 3
    trapped-ising reproduce --figure fig2b --out out/fig2b

Exit status is 0 on success, 2 for configuration errors and 3 for
numerical failures.
"""
from __future__ import annotations

import argparse
import platform
import sys
import time
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from . import io
from .analysis import (
    DetectionModel,
    apply_detection_and_sample,
    classical_ground_manifold,
    detection_confusion,
    manifold_population,
    quasi_degenerate_manifold,
)
from .config import MHZ, ExperimentConfig, from_dict, load_config
from .coupling import CouplingMatrix, compute_couplings, interaction_graph, scan_detuning
from .crystal import solve_equilibrium
from .dynamics import (
    NoiseModel,
    RampSchedule,
    evolve_spin_boson,
    evolve_tfim,
    optimize_ramp_alpha,
    run_reversal_experiment,
)
from .errors import ConfigError, SimulationError
from .figures import PRESETS, preset
from .modes import full_modes, transverse_modes
from .states import polarized_state

US = 1e-6


@dataclass
class System:
    geometry: object
    spectrum: object
    raman: object = None
    coupling: CouplingMatrix = None


def build_system(cfg: ExperimentConfig, couplings=True) -> System:
    geom = solve_equilibrium(cfg.trap)
    spec = transverse_modes(cfg.trap, geom)
    system = System(geom, spec)
    if couplings:
        system.raman = cfg.raman.build(geom, spec, cfg.trap.mass)
        system.coupling = compute_couplings(spec, system.raman, cfg.trap.mass,
                                            cfg.raman.guard_band)
    return system


def target_manifold(cfg: ExperimentConfig, jm: CouplingMatrix):
    """Classical configurations the ramp should end in."""
    s = cfg.evolution.sign * (1 if cfg.evolution.target == "ground" else -1)
    signed = CouplingMatrix(s * jm.j, jm.detuning_mu, jm.spectrum_ref)
    if cfg.analysis.manifold == "quasi":
        return quasi_degenerate_manifold(signed, cfg.analysis.max_manifold)
    eps = None if cfg.analysis.eps_deg_mhz is None else cfg.analysis.eps_deg_mhz * MHZ
    return classical_ground_manifold(signed, eps)


def initial_state(cfg: ExperimentConfig):
    spec = cfg.evolution.initial
    return polarized_state(cfg.trap.n_ions, spec[1], spec[0] == "+")


def resolve_schedule(cfg: ExperimentConfig, jm, initial, manifold):
    """Ramp schedule, optimizing the steepness if the config asks for it."""
    info = {}
    if cfg.schedule.optimize:
        opt = optimize_ramp_alpha(jm, cfg.schedule.b0, cfg.schedule.duration, initial,
                                  manifold, cfg.evolution.sign)
        info = {"optimized": True, "optimized_population": opt.population}
        schedule = cfg.schedule.build(opt.ramp_alpha)
    else:
        schedule = cfg.schedule.build()
    info.update(schedule.to_record())
    return schedule, info


def _use_noise(cfg, no_noise):
    return cfg.noise is not None and not no_noise


def _readout(cfg, probs, out, files, shots):
    """Exact readout histogram, plus sampled shots when a shot count is set."""
    fidelity = 1.0 if cfg.detection is None else cfg.detection["fidelity"]
    if shots is None:
        shots = 0 if cfg.detection is None else cfg.detection["shots"]
    readout = detection_confusion(probs, fidelity)
    files += io.write_histogram(out, readout, cfg.trap.n_ions, "readout_histogram.csv")
    if not shots:
        return readout, None
    det = DetectionModel.uniform(cfg.trap.n_ions, fidelity, shots, cfg.seed)
    result = apply_detection_and_sample(probs, det)
    files += io.write_shots(out, result)
    files += io.write_histogram(out, result.histogram, cfg.trap.n_ions,
                                "sampled_histogram.csv")
    return readout, {"shots": det.shots, "seed": det.rng_seed, "fidelity": fidelity}


def cmd_geometry(cfg: ExperimentConfig, out):
    geom = solve_equilibrium(cfg.trap)
    files = io.write_geometry(out, geom)
    return files, {"n_ions": geom.n_ions, "min_separation_m": geom.min_separation,
                   "max_residual_force_n": geom.max_residual_force}


def cmd_modes(cfg: ExperimentConfig, out):
    system = build_system(cfg, couplings=False)
    full = full_modes(cfg.trap, system.geometry)
    files = io.write_geometry(out, system.geometry)
    files += io.write_spectrum(out, system.spectrum)
    files += io.write_spectrum(out, full)
    return files, {"transverse_mhz": system.spectrum.frequencies_hz() / 1e6,
                   "degenerate": system.spectrum.degenerate}


def cmd_couplings(cfg: ExperimentConfig, out):
    system = build_system(cfg)
    jm = system.coupling
    edges = interaction_graph(jm, cfg.analysis.edge_threshold)
    files = io.write_couplings(out, jm, edges)
    manifold = classical_ground_manifold(jm)
    files += io.write_manifold(out, manifold, "classical_manifold.json")
    return files, {"detuning_mhz": jm.detuning_mu / MHZ,
                   "max_abs_j_hz": jm.max_abs / 2 / np.pi,
                   "classical_degeneracy": manifold.size}


def cmd_scan(cfg: ExperimentConfig, out, mu_range=None):
    system = build_system(cfg, couplings=False)
    if mu_range is None:
        mu_range = cfg.analysis.mu_range_mhz
    if mu_range is None:
        f = system.spectrum.frequencies_hz() / 1e6
        mu_range = [f[-1] - 0.05, f[0] + 0.05, 0.001]
    lo, hi, step = (float(v) for v in mu_range)
    template = cfg.raman.build(system.geometry, system.spectrum, cfg.trap.mass)
    points = scan_detuning(system.spectrum, template, (lo * MHZ, hi * MHZ), step * MHZ,
                           cfg.trap.mass, cfg.raman.guard_band)
    files = io.write_scan(out, points)
    return files, {"points": len(points), "skipped": sum(p.skipped for p in points),
                   "mu_range_mhz": [lo, hi, step]}


def cmd_evolve(cfg: ExperimentConfig, out, shots=None, no_noise=False):
    system = build_system(cfg)
    jm = system.coupling
    psi0 = initial_state(cfg)
    manifold = target_manifold(cfg, jm)
    schedule, ramp = resolve_schedule(cfg, jm, psi0, manifold)
    ev = cfg.evolution
    files = io.write_couplings(out, jm, interaction_graph(jm, cfg.analysis.edge_threshold))
    if ev.engine == "spin_boson" or _use_noise(cfg, no_noise):
        noise = cfg.noise if _use_noise(cfg, no_noise) else NoiseModel(
            0.0, cfg.noise.phonon_cutoff if cfg.noise else 15)
        traj = evolve_spin_boson(system.raman, system.spectrum, noise, schedule, psi0,
                                 ev.mode_index, cfg.trap.mass, ev.integrator_tol, ev.sign,
                                 manifold)
        columns = {"t_us": traj.times / US, "b_mhz": traj.fields / MHZ,
                   "manifold_population": traj.manifold_population, "nbar": traj.nbar,
                   "trace": traj.trace, "min_eigenvalue": traj.min_eigenvalue}
        engine = {"engine": "spin_boson", "heating_rate": noise.heating_rate,
                  "phonon_cutoff": traj.phonon_cutoff, "retried": traj.metadata["retried"]}
    else:
        traj = evolve_tfim(jm, schedule, psi0, ev.integrator_tol, ev.sign, manifold,
                           track_ground=ev.track_ground)
        columns = {"t_us": traj.times / US, "b_mhz": traj.fields / MHZ,
                   "manifold_population": traj.manifold_population,
                   "ground_manifold_population": traj.ground_manifold_population,
                   "ground_overlap": traj.ground_overlap,
                   "energy_rad_s": traj.energies}
        engine = {"engine": "closed", "norm_drift": traj.norm_drift}
    files += io.write_trajectory(out, columns)
    probs = traj.final_state.probabilities("y")
    files += io.write_histogram(out, probs, cfg.trap.n_ions)
    readout, sampling = _readout(cfg, probs, out, files, shots)
    final_pop = manifold_population(probs, manifold)
    readout_pop = manifold_population(readout, manifold)
    files += io.write_manifold(out, manifold, final_population=final_pop,
                               readout_population=readout_pop)
    summary = {"final_manifold_population": final_pop,
               "readout_manifold_population": readout_pop,
               "manifold_size": manifold.size, "ramp": ramp, **engine}
    if sampling is not None:
        summary["sampling"] = sampling
    return files, summary


def cmd_reverse(cfg: ExperimentConfig, out, no_noise=False):
    system = build_system(cfg)
    jm = system.coupling
    psi0 = initial_state(cfg)
    manifold = target_manifold(cfg, jm)
    fwd_cfg = cfg.schedule
    if fwd_cfg.optimize:
        opt = optimize_ramp_alpha(jm, fwd_cfg.b0, fwd_cfg.duration, psi0, manifold,
                                  cfg.evolution.sign)
        alpha = opt.ramp_alpha
    else:
        alpha = fwd_cfg.build().ramp_alpha
    schedule = RampSchedule(fwd_cfg.b0, alpha, fwd_cfg.duration, "round_trip")
    noise = cfg.noise if _use_noise(cfg, no_noise) else None
    result = run_reversal_experiment(jm, schedule, psi0, cfg.evolution.sign, noise,
                                     system.raman, system.spectrum, cfg.evolution.mode_index,
                                     cfg.evolution.integrator_tol)
    files = io.write_sx(out, {"initial": result.initial, "mid": result.mid,
                              "final": result.final})
    return files, {"return_population": result.return_population,
                   "initial_peak_population": float(result.initial.max()),
                   "mid_mean_sx": result.mean_sx("mid"),
                   "noise": noise is not None, "ramp": schedule.to_record()}


COMMANDS = {
    "geometry": cmd_geometry,
    "modes": cmd_modes,
    "couplings": cmd_couplings,
    "scan": cmd_scan,
    "evolve": cmd_evolve,
    "reverse": cmd_reverse,
}


def _versions():
    try:
        pkg = metadata.version("trapped-ising")
    except metadata.PackageNotFoundError:
        pkg = "unknown"
    return {"trapped_ising": pkg, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


def run_command(command, cfg: ExperimentConfig, out, mu_range=None, shots=None,
                no_noise=False):
    """Run one command and write its manifest; returns the manifest record."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    if command == "scan":
        files, summary = cmd_scan(cfg, out, mu_range)
    elif command == "evolve":
        files, summary = cmd_evolve(cfg, out, shots, no_noise)
    elif command == "reverse":
        files, summary = cmd_reverse(cfg, out, no_noise)
    else:
        files, summary = COMMANDS[command](cfg, out)
    raw = dict(cfg.raw, seed=cfg.seed)
    if no_noise:
        raw.pop("noise", None)
    manifest = {
        "command": command,
        "config": raw,
        "seed": cfg.seed,
        "versions": _versions(),
        "wall_time_s": time.perf_counter() - start,
        "files": sorted(Path(f).relative_to(out).as_posix() for f in files),
        "summary": summary,
    }
    if command == "evolve" and shots:
        manifest["config"].setdefault("detection", {})
        manifest["config"]["detection"] = dict(manifest["config"]["detection"], shots=shots)
        manifest["config"]["detection"].setdefault("fidelity", 1.0)
    io.write_json(out / "manifest.json", manifest)
    return manifest


def cmd_reproduce(figure_id, out, seed=None, shots=None, no_noise=False):
    command, raw = preset(figure_id)
    if seed is not None:
        raw["seed"] = seed
    return run_command(command, from_dict(raw), out, shots=shots, no_noise=no_noise)


def _mu_range(text):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError as err:
        raise argparse.ArgumentTypeError("expected LO:HI:STEP in MHz") from err
    return [lo, hi, step]


def build_parser():
    parser = argparse.ArgumentParser(prog="trapped-ising", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["reproduce"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "reproduce")
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--seed", type=int, default=None)
        if name == "reproduce":
            p.add_argument("--figure", required=True, choices=sorted(PRESETS))
        if name == "scan":
            p.add_argument("--mu-range", type=_mu_range, default=None)
        if name in ("evolve", "reproduce"):
            p.add_argument("--shots", type=int, default=None)
        if name in ("evolve", "reverse", "reproduce"):
            p.add_argument("--no-noise", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            out = args.out or Path("out") / args.figure
            cmd_reproduce(args.figure, out, args.seed, args.shots, args.no_noise)
        else:
            cfg = load_config(args.config)
            if args.seed is not None:
                if args.seed < 0:
                    raise ConfigError("--seed: expected a non-negative integer")
                cfg.seed = args.seed
            out = args.out or Path(cfg.output_dir)
            run_command(args.command, cfg, out, getattr(args, "mu_range", None),
                        getattr(args, "shots", None), getattr(args, "no_noise", False))
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (SimulationError, ValueError, ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
