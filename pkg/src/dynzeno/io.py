"""Plain-text artifacts: traces, sweeps, control tables, density matrices and manifests.

Floats are written with 12 significant digits so regenerated files are
byte-stable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import ZenoTrace
from .operators import ValidationError

__all__ = [
    "fmt",
    "trace_header",
    "write_trace",
    "read_trace",
    "TraceComparison",
    "compare_traces",
    "write_sweep",
    "read_sweep",
    "write_coherence_sweep",
    "write_controls",
    "read_controls",
    "write_state",
    "read_state",
    "write_manifest",
]

SWEEP_HEADER = ["tau_m", "omega_branch", "dirichlet_mag_over_N", "approx_error"]
CONTROL_HEADER = ["segment", "channel", "amplitude_hz"]


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def trace_header(num_system_spins: int) -> list[str]:
    cols = ["cycle", "D", "signal"]
    for j in range(1, num_system_spins + 1):
        cols += [f"bx_{j}", f"by_{j}", f"bz_{j}"]
    return cols


def write_trace(path, trace: ZenoTrace) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(trace.num_system_spins))
        for k in trace.cycles:
            row = [str(k), fmt(trace.coherence[k]), fmt(trace.signal[k])]
            row += [fmt(x) for x in trace.bloch[k].ravel()]
            w.writerow(row)
    return path


def read_trace(path) -> dict[str, np.ndarray]:
    """Columns of a trace file; ``bloch`` is reassembled to ``(rows, spins, 3)``."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[:3] != ["cycle", "D", "signal"] or (len(header) - 3) % 3:
        raise ValidationError(f"{path}: not a trace file")
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {
        "cycle": data[:, 0].astype(int),
        "D": data[:, 1],
        "signal": data[:, 2],
        "bloch": data[:, 3:].reshape(len(body), -1, 3),
    }


@dataclass(frozen=True)
class TraceComparison:
    max_delta_d: float
    max_bloch_deviation: float
    rows: int


def compare_traces(a, b) -> TraceComparison:
    """Largest coherence and Bloch-vector differences between two trace files."""
    ta, tb = read_trace(a), read_trace(b)
    if ta["D"].shape != tb["D"].shape or ta["bloch"].shape != tb["bloch"].shape:
        raise ValidationError(
            f"trace shapes differ: {ta['bloch'].shape} vs {tb['bloch'].shape}"
        )
    dd = float(np.max(np.abs(ta["D"] - tb["D"]), initial=0.0))
    db = float(np.max(np.linalg.norm(ta["bloch"] - tb["bloch"], axis=-1), initial=0.0))
    return TraceComparison(dd, db, len(ta["D"]))


def write_sweep(path, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in rows:
            w.writerow([fmt(r.tau_m), fmt(r.omega_branch), fmt(r.dirichlet_mag_over_n), fmt(r.approx_error)])
    return path


def read_sweep(path) -> np.ndarray:
    """Sweep rows as a float array with columns in :data:`SWEEP_HEADER` order."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != SWEEP_HEADER:
        raise ValidationError(f"{path}: not an appendix sweep file")
    return np.array(rows[1:], dtype=float).reshape(-1, len(SWEEP_HEADER))


def write_coherence_sweep(path, tau_m, min_d, max_d) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau_m", "min_D", "max_D"])
        for t, lo, hi in zip(tau_m, min_d, max_d):
            w.writerow([fmt(t), fmt(lo), fmt(hi)])
    return path


def write_controls(path, amplitudes: np.ndarray) -> Path:
    path = Path(path)
    amplitudes = np.asarray(amplitudes, dtype=float)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONTROL_HEADER)
        for (k, c), a in np.ndenumerate(amplitudes):
            w.writerow([k, c, fmt(a)])
    return path


def read_controls(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != CONTROL_HEADER:
        raise ValidationError(f"{path}: not a control table")
    body = [(int(k), int(c), float(a)) for k, c, a in rows[1:]]
    n_seg = max(k for k, _, _ in body) + 1
    n_ch = max(c for _, c, _ in body) + 1
    out = np.zeros((n_seg, n_ch))
    for k, c, a in body:
        out[k, c] = a
    return out


def write_state(path, rho: np.ndarray, **meta) -> Path:
    """Density matrix as JSON with separate real and imaginary tables."""
    rho = np.asarray(rho, dtype=complex)
    doc = {
        "dim": rho.shape[0],
        "real": [[float(fmt(x)) for x in row] for row in rho.real],
        "imag": [[float(fmt(x)) for x in row] for row in rho.imag],
        **meta,
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def read_state(path) -> np.ndarray:
    doc = json.loads(Path(path).read_text())
    rho = np.array(doc["real"], dtype=float) + 1j * np.array(doc["imag"], dtype=float)
    if rho.shape != (doc["dim"], doc["dim"]):
        raise ValidationError(f"{path}: table shape does not match dim")
    return rho


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_manifest(path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return path
