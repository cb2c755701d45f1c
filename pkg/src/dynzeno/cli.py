"""Command-line scenario runner.

    dynzeno run --config single.ini --out results/
    dynzeno sweep --workers 4
    dynzeno check-appendix
    dynzeno grape --seed 3
    dynzeno compare results/a/trace.csv results/b/trace.csv
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import appendix, engine, io, scenarios
from .config import ScenarioConfig, load_config
from .grape import grape_optimize
from .operators import ValidationError

__all__ = ["run_scenario", "main"]

PROTOCOL_SCENARIOS = ("single", "pps", "entangled")


def _grid(p: dict) -> np.ndarray:
    n = int(round((p["tau_m_stop"] - p["tau_m_start"]) / p["tau_m_step"]))
    if n < 0:
        raise ValidationError("tau_m_stop must not precede tau_m_start")
    return p["tau_m_start"] + p["tau_m_step"] * np.arange(n + 1)


def _build(name: str, p: dict) -> scenarios.Scenario:
    if name == "pps":
        return scenarios.product_state(p["delta"], p["j01"], p["j02"], p["j12"], p["p"], p["tau"])
    if name == "entangled":
        return scenarios.entangled_state(p["delta"], p["j12"], p["j0"], p["p"], p["tau"])
    return scenarios.single_qubit(p["delta1"], p["j01"], p["p1"], p["tau"])


def _predicted_criticals(name: str, p: dict) -> dict:
    """First-order critical times of both apparatus branches; invalid physics raises."""
    out = {}
    for m0 in (0.5, -0.5):
        if name == "pps":
            for j, j0 in ((1, p["j01"]), (2, p["j02"])):
                out[f"spin{j}_m0={m0:+g}"] = engine.critical_time_pps(p["delta"], j0, m0, p["j12"], 1)
        elif name == "entangled":
            out[f"m0={m0:+g}"] = engine.critical_time_xxx(p["delta"], p["j0"], "+" if m0 > 0 else "-", 1)
        else:
            out[f"m0={m0:+g}"] = engine.critical_time_single(p["delta1"], p["j01"], m0, 1)
    return out


def _run_protocol(cfg: ScenarioConfig, out: Path) -> dict:
    p = cfg.params
    criticals = _predicted_criticals(cfg.scenario, p)
    sc = _build(cfg.scenario, p)
    trace = engine.run_protocol(sc.system, sc.h_meas, sc.protocol(p["tau_m"], p["n_cycles"], p["decay_k"]))
    io.write_trace(out / "trace.csv", trace)
    minima, maxima = engine.find_extrema(trace.coherence)
    summary = {
        "min_D": trace.coherence.min(),
        "max_D": trace.coherence.max(),
        "min_fidelity": trace.fidelity.min(),
        "final_fidelity": trace.fidelity[-1],
        "D_minima": minima,
        "D_maxima": maxima,
        "critical_times": criticals,
    }
    if cfg.scenario == "single":
        summary["regime"] = {
            f"m0={m0:+g}": engine.classify_regime(p["delta1"], p["j01"], m0, p["tau_m"], p["p1"], p["tau"]).regime
            for m0 in (0.5, -0.5)
        }
    if cfg.scenario == "entangled":
        io.write_state(out / "state_initial.json", trace.system_states[0], cycle=0)
        io.write_state(out / "state_final.json", trace.system_states[-1], cycle=trace.n_cycles)
    return summary


def _sweep_point(args) -> tuple[float, float]:
    p, tau_m = args
    sc = scenarios.single_qubit(p["delta1"], p["j01"], p["p1"], p["tau"])
    d = engine.coherence_series(sc.system, sc.h_meas, sc.protocol(tau_m, p["n_cycles"]))
    return float(d.min()), float(d.max())


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _run_sweep(cfg: ScenarioConfig, out: Path) -> dict:
    p = cfg.params
    criticals = _predicted_criticals("single", p)
    grid = _grid(p)
    res = np.array(_map(_sweep_point, [(p, t) for t in grid], cfg.workers))
    io.write_coherence_sweep(out / "sweep.csv", grid, res[:, 0], res[:, 1])
    minima, _ = engine.find_extrema(res[:, 0])
    dips = [float(grid[i]) for i in minima if res[i, 0] < 0.1]
    return {
        "points": len(grid),
        "deep_dips_tau_m": dips,
        "critical_times": criticals,
    }


def _appendix_point(args):
    p, tau_m = args
    return appendix.appendix_sweep([tau_m], p["delta1"], p["j01"], p["p1"], p["tau"], p["n_cycles"])


def _run_appendix(cfg: ScenarioConfig, out: Path) -> dict:
    p = cfg.params
    grid = _grid(p)
    rows = [r for chunk in _map(_appendix_point, [(p, t) for t in grid], cfg.workers) for r in chunk]
    io.write_sweep(out / "appendix_sweep.csv", rows)
    crit = appendix.single_branch_criticals(p["delta1"], p["j01"], grid[0], grid[-1])
    hits = sorted({r.tau_m for r in rows if r.dirichlet_mag_over_n >= p["threshold"]})
    crit_t = [t for t, _ in crit]
    stray = [h for h in hits if min((abs(h - t) for t in crit_t), default=np.inf) > 50e-6]
    detected = [t for t in crit_t if any(abs(h - t) <= 50e-6 for h in hits)]
    return {
        "critical_times": crit_t,
        "resonant_points": len(hits),
        "stray_resonances": stray,
        "detected_criticals": detected,
        "agreement": not stray and len(detected) == len(crit_t),
    }


def _run_grape(cfg: ScenarioConfig, out: Path) -> dict:
    p = cfg.params
    problem = scenarios.grape_problem_single(
        tau_m=p["tau_m"],
        k_cycles=p["k_cycles"],
        duration=p["duration"],
        n_segments=p["n_segments"],
        amplitude_bound=p["amplitude_bound"],
        seed=cfg.seed,
        max_iterations=p["max_iterations"],
        target_fidelity=p["target_fidelity"],
        robust=p["robust"],
        delta1=p["delta1"],
        j01=p["j01"],
        p1=p["p1"],
        tau=p["tau"],
    )
    result = grape_optimize(problem)
    io.write_controls(out / "controls.csv", result.amplitudes)
    return {
        "fidelity": result.fidelity,
        "nominal_fidelity": result.nominal_fidelity,
        "iterations": result.iterations,
        "converged": result.converged,
        "seed": cfg.seed,
        "channels": ["I_x^0", "I_y^0", "I_x^1", "I_y^1"],
    }


_RUNNERS = {
    "single": _run_protocol,
    "pps": _run_protocol,
    "entangled": _run_protocol,
    "sweep": _run_sweep,
    "appendix_check": _run_appendix,
    "grape": _run_grape,
}


def run_scenario(config: ScenarioConfig) -> int:
    """Run one configured scenario, write its files and a manifest; return an exit status."""
    try:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        results = _RUNNERS[config.scenario](config, out)
        io.write_manifest(out / "manifest.json", {"config": config.resolved(), "results": results})
    except ValidationError as exc:
        print(f"dynzeno: invalid {config.scenario} configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dynzeno: cannot write output to {config.out}: {exc}", file=sys.stderr)
        return 3
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI scenario file")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")
    common.add_argument("--workers", type=int, help="parallel sweep workers")

    ap = argparse.ArgumentParser(prog="dynzeno", description="Entanglement-based quantum Zeno simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run a single, pps or entangled protocol")
    run.add_argument("--scenario", choices=PROTOCOL_SCENARIOS)
    sub.add_parser("sweep", parents=[common], help="minimum coherence over a tau_m grid")
    sub.add_parser("grape", parents=[common], help="synthesise a compressed pulse")
    sub.add_parser("check-appendix", parents=[common], help="Dirichlet kernels vs critical times")
    cmp_ = sub.add_parser("compare", help="compare two trace files")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    return ap


_COMMAND_SCENARIO = {"sweep": "sweep", "grape": "grape", "check-appendix": "appendix_check"}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "compare":
        try:
            report = io.compare_traces(args.a, args.b)
        except (ValidationError, OSError) as exc:
            print(f"dynzeno compare: {exc}", file=sys.stderr)
            return 2
        print(json.dumps(report.__dict__))
        return 0
    try:
        scenario = _COMMAND_SCENARIO.get(args.command, getattr(args, "scenario", None))
        cfg = load_config(args.config, scenario=scenario)
        if args.command == "run" and cfg.scenario not in PROTOCOL_SCENARIOS:
            raise ValidationError(f"'run' expects one of {PROTOCOL_SCENARIOS}, config names {cfg.scenario!r}")
        if args.out is not None:
            cfg.out = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        if args.workers is not None:
            if args.workers < 1:
                raise ValidationError("workers must be at least 1")
            cfg.workers = args.workers
    except ValidationError as exc:
        print(f"dynzeno: {exc}", file=sys.stderr)
        return 2
    return run_scenario(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
