"""Plain-text output: CSV for arrays, JSON for structured records.

Floats are written with ``repr`` so files are exact and byte-stable for a
given computation.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import GroundManifold, SampleResult, sx_values
from .coupling import CouplingMatrix
from .crystal import CrystalGeometry
from .modes import ModeSpectrum

TWO_PI = 2 * np.pi


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_json(path, record):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(record), indent=2, sort_keys=True) + "\n")
    return path


def write_geometry(directory, geom: CrystalGeometry):
    d = Path(directory)
    rows = [(i + 1, *p) for i, p in enumerate(geom.positions)]
    return [write_csv(d / "geometry.csv", ["ion", "x_m", "y_m", "z_m"], rows),
            write_json(d / "geometry.json", geom.to_record())]


def read_geometry(path):
    _, rows = read_csv(path)
    return np.array([[float(v) for v in r[1:]] for r in rows])


def write_spectrum(directory, spec: ModeSpectrum):
    n = spec.mode_matrix.shape[0]
    header = ["mode", "frequency_mhz", "axis"] + [f"b_{k + 1}" for k in range(n)]
    labels = spec.labels or [spec.axis] * spec.n_modes
    rows = [(m, f / TWO_PI / 1e6, labels[m], *spec.mode_matrix[:, m])
            for m, f in enumerate(spec.frequencies)]
    return [write_csv(Path(directory) / f"modes_{spec.axis}.csv", header, rows)]


def write_couplings(directory, jm: CouplingMatrix, edges=()):
    d = Path(directory)
    n = jm.n_ions
    rows = [(i + 1, *(jm.j[i] / TWO_PI)) for i in range(n)]
    files = [write_csv(d / "couplings_hz.csv", ["ion"] + [str(k + 1) for k in range(n)], rows)]
    files.append(write_json(d / "graph.json", {
        "detuning_mhz": jm.detuning_mu / TWO_PI / 1e6,
        "max_abs_j_hz": jm.max_abs / TWO_PI,
        "edges": [e.to_record() for e in edges],
    }))
    return files


def write_scan(directory, points):
    rows = []
    for p in points:
        if p.skipped:
            rows.append((p.mu / TWO_PI / 1e6, 1, "", "", ""))
        else:
            m = p.manifold
            rows.append((p.mu / TWO_PI / 1e6, 0, m.size, ";".join(m.bitstrings()),
                         p.coupling.max_abs / TWO_PI))
    header = ["mu_mhz", "skipped", "degeneracy", "configurations", "max_abs_j_hz"]
    return [write_csv(Path(directory) / "scan.csv", header, rows)]


def write_trajectory(directory, columns: dict, name="trajectory.csv"):
    """Columns of equal length; ``None`` entries are dropped."""
    cols = {k: np.asarray(v) for k, v in columns.items() if v is not None}
    header = list(cols)
    rows = zip(*cols.values())
    return [write_csv(Path(directory) / name, header, rows)]


def write_histogram(directory, probabilities, n_ions, name="histogram.csv"):
    p = np.asarray(probabilities)
    rows = [(k, format(k, f"0{n_ions}b"), p[k]) for k in range(len(p))]
    return [write_csv(Path(directory) / name, ["index", "bitstring", "probability"], rows)]


def write_manifold(directory, manifold: GroundManifold, name="manifold.json", **extra):
    record = manifold.to_record()
    record.update(extra)
    return [write_json(Path(directory) / name, record)]


def write_sx(directory, distributions: dict, name="sx_distributions.csv"):
    n = len(next(iter(distributions.values()))) - 1
    header = ["sx"] + list(distributions)
    rows = zip(sx_values(n), *distributions.values())
    return [write_csv(Path(directory) / name, header, rows)]


def write_shots(directory, sample: SampleResult, name="shots.txt"):
    path = Path(directory) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(sample.lines()) + "\n")
    return [path]
