"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``criterion N PASS/FAIL`` line (visible with ``-s``) and
the terminal summary repeats all of them. Run on its own with

    pytest tests/test_acceptance.py -v
"""

import time

import numpy as np
import pytest

from dynzeno.appendix import (
    approx_error,
    approx_u_tot_single,
    dirichlet_factor,
    single_branch_criticals,
)
from dynzeno.engine import (
    Regime,
    apply_decay,
    classify_regime,
    coherence_series,
    critical_time_pps,
    critical_time_single,
    critical_time_xxx,
    run_protocol,
    total_propagator,
)
from dynzeno.grape import grape_optimize, gradient_check
from dynzeno.hamiltonians import NATURAL_COUPLINGS, h_meas_pps, h_meas_single, h_meas_xxx, h_s_xxx
from dynzeno.operators import apparatus_block, commutator_norm
from dynzeno.scenarios import entangled_state, grape_problem_single, product_state, single_qubit
from dynzeno.states import eigencheck_phi_plus, pps, prepare_phi_plus

J01 = NATURAL_COUPLINGS[(0, 1)]


def test_criterion_1_critical_times(criterion):
    done = criterion(1, "critical-time regression")
    got = {
        "single": (critical_time_single(300, J01, -0.5, 1), 2.5176e-3, 2.517e-3),
        "pps": (critical_time_pps(400, J01, 0.5, 48.3, 1), 3.0586e-3, 3.059e-3),
        "xxx": (critical_time_xxx(200, 250, "+", 1), 3.0769e-3, 3.077e-3),
    }
    ok = all(abs(t - four) < 5e-8 and abs(t - quoted) <= 1e-6 for t, four, quoted in got.values())
    detail = ", ".join(f"{k}={t * 1e3:.4f} ms (quoted {q * 1e3:.3f})" for k, (t, _, q) in got.items())
    assert done(ok, detail)


def test_criterion_2_three_regimes(criterion):
    done = criterion(2, "three-regime reproduction")
    sc = single_qubit()
    t0 = time.perf_counter()
    d = {tm: run_protocol(sc.system, sc.h_meas, sc.protocol(tm, 120)).coherence for tm in (2.5176e-3, 3e-3, 2.55e-3)}
    elapsed = time.perf_counter() - t0
    res = d[2.5176e-3]
    k_min = int(np.argmin(res))
    later_max = res[k_min:].max()
    amp = {tm: 1 - v.min() for tm, v in d.items()}
    ok = (
        res.min() < 0.1
        and later_max > 0.95
        and d[3e-3].min() > 0.9
        and amp[3e-3] < amp[2.55e-3] < amp[2.5176e-3]
        and elapsed < 1.0
    )
    detail = (
        f"resonant min D={res.min():.4f} at k={k_min}, later max {later_max:.4f}; "
        f"3 ms min D={d[3e-3].min():.4f}; 2.55 ms amplitude {amp[2.55e-3]:.3f} "
        f"(between {amp[3e-3]:.3f} and {amp[2.5176e-3]:.3f}); {elapsed:.2f} s"
    )
    assert done(ok, detail)


def test_criterion_3_regime_classifier(criterion):
    done = criterion(3, "regime classifier agreement")
    expected = {2.5176e-3: Regime.RESONANT, 3e-3: Regime.ZENO, 2.55e-3: Regime.INTERMEDIATE}
    got = {tm: classify_regime(300, J01, -0.5, tm, 18000, 1e-6).regime for tm in expected}
    ok = got == expected
    assert done(ok, ", ".join(f"{tm * 1e3:g} ms -> {r.value}" for tm, r in got.items()))


def test_criterion_4_entanglement(criterion):
    done = criterion(4, "entanglement preservation")
    sc = entangled_state()
    t0 = time.perf_counter()
    far = run_protocol(sc.system, sc.h_meas, sc.protocol(3.7e-3, 100)).fidelity
    crit = run_protocol(sc.system, sc.h_meas, sc.protocol(3.0769e-3, 100)).fidelity
    elapsed = time.perf_counter() - t0
    ok = far.min() >= 0.99 and crit.min() < 0.5 and elapsed < 5.0
    detail = (
        f"3.7 ms min F={far.min():.4f}; 3.0769 ms min F={crit.min():.4f} at k={int(np.argmin(crit))}; "
        f"tau={sc.tau * 1e6:g} us; {elapsed:.2f} s"
    )
    assert done(ok, detail)


def test_criterion_5_appendix_convergence(criterion):
    done = criterion(5, "appendix-oracle convergence")
    sc = single_qubit()
    t0 = time.perf_counter()
    errs = []
    for tau in (4e-6, 2e-6, 1e-6, 0.5e-6):
        n = int(round(120e-6 / tau))
        exact = total_propagator(sc.system, sc.h_meas, sc.drive, tau, 3.5e-3, n)
        errs.append(approx_error(exact, approx_u_tot_single(300, J01, 18000, tau, 3.5e-3, n)))
    elapsed = time.perf_counter() - t0
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    ok = all(1.5 <= r <= 2.5 for r in ratios) and elapsed < 5.0
    detail = f"errors {', '.join(f'{e:.3e}' for e in errs)}; ratios {', '.join(f'{r:.2f}' for r in ratios)}"
    assert done(ok, detail)


def test_criterion_6_dirichlet_scan(criterion):
    done = criterion(6, "Dirichlet/criticals cross-validation")
    grid = 2e-3 + 1e-6 * np.arange(3001)
    crit = single_branch_criticals(300, J01, grid[0], grid[-1])
    crit_t = np.array([t for t, _ in crit])
    omegas = [300 + J01 * m0 for m0 in (0.5, -0.5)]
    hits = [t for t in grid if max(abs(dirichlet_factor(60, t, w)) / 60 for w in omegas) >= 0.9]
    worst = max(np.min(np.abs(crit_t - h)) for h in hits)
    detected = [t for t in crit_t if any(abs(h - t) <= 50e-6 for h in hits)]
    both = all(any(abs(t - ref) < 1e-7 for t in detected) for ref in (2.5176e-3, 4.9310e-3))
    ok = worst <= 50e-6 and both
    detail = (
        f"{len(hits)} grid points with |f|/N >= 0.9, farthest {worst * 1e6:.0f} us from a critical; "
        f"detected {', '.join(f'{t * 1e3:.4f}' for t in detected)} ms"
    )
    assert done(ok, detail)


def test_criterion_7_grape(criterion):
    done = criterion(7, "GRAPE pulse compression")
    t0 = time.perf_counter()
    problem = grape_problem_single()
    res = grape_optimize(problem)
    check = gradient_check(problem, res.amplitudes)
    elapsed = time.perf_counter() - t0
    ok = res.fidelity >= 0.99 and res.iterations <= 2000 and check < 1e-3 and elapsed < 60
    detail = (
        f"fidelity {res.fidelity:.4f} after {res.iterations} iterations, "
        f"{problem.n_segments} segments over {problem.duration * 1e3:g} ms; "
        f"gradient check {check:.2e}; {elapsed:.1f} s"
    )
    assert done(ok, detail)


def test_criterion_8_invariants(criterion):
    done = criterion(8, "invariant suite")
    failures = []
    rng = np.random.default_rng(8)

    # unitarity of every evolution operator and both apparatus blocks
    sc = single_qubit()
    worst_u = 0.0
    for _ in range(50):
        tm, n = rng.uniform(0, 6e-3), int(rng.integers(1, 120))
        u = total_propagator(sc.system, sc.h_meas, sc.drive, 1e-6, tm, n)
        for m in (u, apparatus_block(u, 0), apparatus_block(u, 1)):
            worst_u = max(worst_u, np.max(np.abs(m.conj().T @ m - np.eye(len(m)))))
    if worst_u >= 1e-10:
        failures.append(f"unitarity {worst_u:.1e}")

    # D in [0, 1]
    d_lo, d_hi = 1.0, 0.0
    for scen in (single_qubit(), product_state(), entangled_state()):
        for tm in rng.uniform(2e-3, 5e-3, size=5):
            d = coherence_series(scen.system, scen.h_meas, scen.protocol(tm, 100))
            d_lo, d_hi = min(d_lo, d.min()), max(d_hi, d.max())
    if d_lo < 0 or d_hi > 1 + 1e-9:
        failures.append(f"D range [{d_lo}, {d_hi}]")

    # density matrices stay valid under the protocol
    ent = entangled_state()
    u = total_propagator(ent.system, ent.h_meas, ent.drive, ent.tau, 3.0769e-3, 37)
    rho = u @ prepare_phi_plus(pps(0.4)) @ u.conj().T
    if abs(np.trace(rho) - 1) > 1e-12 or np.max(np.abs(rho - rho.conj().T)) > 1e-12 or np.linalg.eigvalsh(rho).min() < -1e-10:
        failures.append("density validity")

    # QND commutators for the three measurement Hamiltonians
    pps_sys = product_state().system
    qnd = []
    for parts in (h_meas_single(300, J01, parts=True), h_meas_pps(pps_sys, parts=True), h_meas_xxx(200, 100, 250, parts=True)):
        qnd += [commutator_norm(parts.system, parts.interaction), commutator_norm(parts.apparatus, parts.interaction)]
    if max(qnd) > 1e-9:
        failures.append(f"QND {max(qnd):.1e}")

    # phi+ is a non-degenerate eigenvector of the XXX system Hamiltonian
    eig = eigencheck_phi_plus(h_s_xxx(200, 100))
    if not (eig.is_eigen and eig.gap > 0):
        failures.append("phi+ eigen")

    # Zeno-limit stability: halving tau at fixed t never lowers min D by more than 1e-3
    mins = []
    for h in range(3):
        tau, n = 1e-6 / 2**h, 120 * 2**h
        mins.append(coherence_series(sc.system, sc.h_meas, sc.protocol(3e-3, n, tau=tau)).min())
    drops = [a - b for a, b in zip(mins, mins[1:])]
    if max(drops) > 1e-3:
        failures.append(f"Zeno limit drop {max(drops):.1e}")

    # decay overlay
    trace = run_protocol(sc.system, sc.h_meas, sc.protocol(2.517e-3, 100))
    mult = apply_decay(trace, 1.25).signal[100] / trace.coherence[100]
    if abs(mult - 0.7300) > 1e-4:
        failures.append(f"decay multiplier {mult:.5f}")

    ok = not failures
    detail = (
        f"max unitarity defect {worst_u:.1e}; D in [{d_lo:.4f}, {d_hi:.4f}]; max QND commutator {max(qnd):.1e}; "
        f"phi+ gap {eig.gap:.1f} rad/s; Zeno min D {', '.join(f'{m:.4f}' for m in mins)}; decay x{mult:.5f}"
    )
    if failures:
        detail += "; failed: " + ", ".join(failures)
    assert done(ok, detail)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
