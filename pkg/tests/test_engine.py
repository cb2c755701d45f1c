import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynzeno.engine import (
    Regime,
    RegimeThresholds,
    ZenoProtocol,
    apply_decay,
    classify_regime,
    coherence,
    coherence_series,
    critical_time_pps,
    critical_time_single,
    critical_time_xxx,
    cycle_propagator,
    find_extrema,
    phase_shift,
    run_protocol,
)
from dynzeno.hamiltonians import RfDrive, SpinSystem, h_meas_single
from dynzeno.operators import (
    PAULI,
    SpinAxis,
    ValidationError,
    apparatus_block,
    basis_state,
    expm_unitary,
    spin_op,
)
from dynzeno.scenarios import entangled_state, product_state, single_qubit
from dynzeno.states import check_density

T_CRIT = critical_time_single(300, -194.4, -0.5, 1)


@pytest.fixture(scope="module")
def sq():
    return single_qubit()


def test_zero_cycles_single_record(sq):
    trace = run_protocol(sq.system, sq.h_meas, sq.protocol(T_CRIT, 0))
    assert trace.coherence.shape == (1,)
    assert trace.coherence[0] == pytest.approx(1.0, abs=1e-15)


def test_resonant_rabi_oscillation(sq):
    d = run_protocol(sq.system, sq.h_meas, sq.protocol(T_CRIT, 120)).coherence
    k_min = int(np.argmin(d[:60]))
    assert d[k_min] < 0.1
    assert d[k_min:].max() > 0.95
    # half an oscillation takes about 1/(2 P1 tau) cycles
    assert abs(k_min - 1 / (2 * 18000 * 1e-6)) <= 2


def test_far_from_critical_is_zeno(sq):
    d = run_protocol(sq.system, sq.h_meas, sq.protocol(3e-3, 100)).coherence
    assert d.min() >= 0.9


def test_critical_time_violation_60_cycles(sq):
    assert coherence_series(sq.system, sq.h_meas, sq.protocol(T_CRIT, 60)).min() < 0.1
    assert coherence_series(sq.system, sq.h_meas, sq.protocol(3e-3, 60)).min() > 0.9


def test_coherence_examples():
    eye = np.eye(2)
    s0 = basis_state("0")
    assert coherence(eye, eye, s0) == 1.0
    assert coherence(eye, PAULI[SpinAxis.X], s0) == 0.0
    assert coherence(np.diag([np.exp(0.7j), 1.0]), eye, s0) == pytest.approx(1.0, abs=1e-15)


def test_critical_times():
    assert T_CRIT == pytest.approx(2.5176e-3, abs=1e-7)
    assert critical_time_single(300, -194.4, 0.5, 1) == pytest.approx(4.9310e-3, abs=1e-7)
    assert critical_time_single(123, 45, -0.5, 0) == 0
    assert critical_time_pps(400, -194.4, 0.5, 48.3, 1) == pytest.approx(3.0586e-3, abs=1e-7)
    assert critical_time_pps(400, 160.7, -0.5, 48.3, 1) == pytest.approx(1 / (400 - 80.35 + 24.15), rel=1e-12)
    assert critical_time_pps(400, 160.7, -0.5, 48.3, 1) == pytest.approx(2.9087e-3, abs=1e-7)
    assert critical_time_pps(400, 160.7, -0.5, 48.3, 0) == 0
    assert critical_time_xxx(200, 250, "+", 1) == pytest.approx(3.0769e-3, abs=1e-7)
    assert critical_time_xxx(200, 250, "-", 1) == pytest.approx(1 / 75)
    assert critical_time_xxx(200, 250, -1, 0) == 0


def test_critical_time_errors():
    with pytest.raises(ValidationError, match="zero"):
        critical_time_single(97.2, 194.4, -0.5, 1)
    with pytest.raises(ValidationError, match="zero"):
        critical_time_pps(100, 100, -0.5, -100, 1)
    with pytest.raises(ValidationError, match="zero"):
        critical_time_xxx(125, 250, "-", 1)
    with pytest.raises(ValidationError, match="negative"):
        critical_time_single(50, 200, -0.5, 1)
    with pytest.raises(ValidationError):
        critical_time_single(300, -194.4, 1, 1)
    with pytest.raises(ValidationError):
        critical_time_xxx(200, 250, "*", 1)


@pytest.mark.parametrize("j0,m0", [(160.7, -0.5), (-194.4, 0.5)])
def test_pps_critical_matches_simulated_dip(j0, m0):
    sc = product_state()
    expected = tau_m = critical_time_pps(400, j0, m0, 48.3, 1)
    grid = np.arange(tau_m - 50e-6, tau_m + 50e-6, 1e-6)
    mins = [coherence_series(sc.system, sc.h_meas, sc.protocol(t, 100)).min() for t in grid]
    assert abs(grid[int(np.argmin(mins))] - expected) < 5e-6
    assert min(mins) < 0.1


def test_phase_shift_examples():
    assert phase_shift(300, -194.4, -0.5, 2.5176e-3) == pytest.approx(2 * np.pi, abs=1e-3)
    assert phase_shift(300, -194.4, -0.5, 0) == 0
    assert phase_shift(300, -194.4, -0.5, 1.2588e-3) == pytest.approx(np.pi, abs=1e-3)
    # not reduced mod 2 pi
    assert phase_shift(300, -194.4, -0.5, 10e-3) > 2 * np.pi


@pytest.mark.parametrize(
    "tau_m,regime",
    [(2.5176e-3, Regime.RESONANT), (3e-3, Regime.ZENO), (2.55e-3, Regime.INTERMEDIATE)],
)
def test_classify_regime_reference_values(tau_m, regime):
    assert classify_regime(300, -194.4, -0.5, tau_m, 18000, 1e-6).regime is regime


def test_classify_regime_bang_bang_and_thresholds():
    tm = critical_time_single(300, -194.4, 0.5, 1) / 2
    r = classify_regime(300, -194.4, 0.5, tm, 18000, 1e-6)
    assert r.regime is Regime.BANG_BANG
    assert r.phase == pytest.approx(np.pi)
    strict = RegimeThresholds(c_lo=0.25, c_hi=1e6)
    assert classify_regime(300, -194.4, -0.5, 3e-3, 18000, 1e-6, strict).regime is Regime.INTERMEDIATE
    with pytest.raises(ValidationError):
        classify_regime(300, -194.4, -0.5, 3e-3, 0, 1e-6)


def test_apply_decay_examples(sq):
    trace = run_protocol(sq.system, sq.h_meas, sq.protocol(2.517e-3, 100))
    np.testing.assert_array_equal(apply_decay(trace, 0).signal, trace.coherence)
    decayed = apply_decay(trace, 1.25)
    np.testing.assert_array_equal(decayed.coherence, trace.coherence)
    assert decayed.signal[100] / decayed.coherence[100] == pytest.approx(0.7300, abs=1e-4)

    flat = run_protocol(sq.system, sq.h_meas, sq.protocol(3e-3, 20, decay_k=0.7))
    flat.coherence[:] = 1.0
    s = apply_decay(flat, 0.7).signal
    assert np.all(np.diff(s) < 0)
    np.testing.assert_allclose(s[1:] / s[:-1], np.exp(-0.0021), rtol=1e-12)
    with pytest.raises(ValidationError):
        apply_decay(flat, -1)


def test_protocol_decay_field(sq):
    trace = run_protocol(sq.system, sq.h_meas, sq.protocol(2.517e-3, 10, decay_k=1.25))
    np.testing.assert_allclose(trace.signal, trace.coherence * np.exp(-1.25 * np.arange(11) * 2.517e-3))


def test_resonant_branch_matches_continuous_drive(sq):
    # the m0 = -1/2 branch lives in the apparatus |1> block
    step = cycle_propagator(sq.system, sq.h_meas, sq.drive, 1e-6, T_CRIT)
    u_branch = apparatus_block(step, 1)
    h_cont = 2 * np.pi * (300 * spin_op(1, 0, "z") + 18000 * spin_op(1, 0, "x"))
    psi = basis_state("0")
    for k in range(1, 61):
        psi = u_branch @ psi
        ref = expm_unitary(h_cont, k * 1e-6) @ basis_state("0")
        infidelity = 1 - abs(np.vdot(ref, psi)) ** 2
        assert infidelity <= min(1e-3 * k, 0.05)


def test_bang_bang_branch_is_reversed(sq):
    tm = 0.5 / (300 - 194.4 / 2)
    step = cycle_propagator(sq.system, sq.h_meas, sq.drive, 1e-6, tm)
    u = apparatus_block(step, 0)
    power = np.eye(2)
    u2 = u @ u
    for _ in range(60):
        power = u2 @ power
        assert abs(power[0, 0]) >= 0.99


def test_zeno_limit_min_d_never_drops():
    sc = single_qubit()
    prev = None
    for h in range(4):
        tau, n = 1e-6 / 2**h, 120 * 2**h
        m = coherence_series(sc.system, sc.h_meas, sc.protocol(3e-3, n, tau=tau)).min()
        if prev is not None:
            assert m >= prev - 1e-3
        prev = m


def test_entanglement_preserved_away_from_critical():
    sc = entangled_state()
    trace = run_protocol(sc.system, sc.h_meas, sc.protocol(3.7e-3, 100))
    assert trace.fidelity.min() >= 0.99
    for rho in trace.system_states:
        check_density(rho, atol=1e-10)


def test_entanglement_lost_at_critical():
    sc = entangled_state()
    trace = run_protocol(sc.system, sc.h_meas, sc.protocol(3.0769e-3, 100))
    assert trace.fidelity.min() < 0.5


def test_coherence_series_matches_run(sq):
    proto = sq.protocol(2.6e-3, 40)
    np.testing.assert_allclose(
        coherence_series(sq.system, sq.h_meas, proto),
        run_protocol(sq.system, sq.h_meas, proto).coherence,
        atol=1e-12,
    )


def test_non_qnd_measurement_rejected(sq):
    bad = sq.h_meas + 2 * np.pi * 50 * spin_op(2, 0, "x")
    with pytest.raises(ValidationError, match=r"\[H_M, I_z\^0\]"):
        run_protocol(sq.system, bad, sq.protocol(3e-3, 5))


def test_weak_drive_rejected():
    sys = SpinSystem(1, couplings={(0, 1): -194.4})
    proto = ZenoProtocol(1e-6, 3e-3, 5, RfDrive((1000.0,), (300.0,)), basis_state("0"))
    with pytest.raises(ValidationError, match="RF amplitude"):
        run_protocol(sys, h_meas_single(300, -194.4), proto)
    run_protocol(sys, h_meas_single(300, -194.4), proto, enforce_strong_drive=False)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"tau": 0.0},
        {"tau_m": -1e-3},
        {"n_cycles": -1},
        {"system_initial": np.array([1.0, 1.0])},
        {"decay_k": -0.5},
    ],
)
def test_protocol_validation(kwargs):
    base = dict(tau=1e-6, tau_m=3e-3, n_cycles=5, drive=RfDrive((18000.0,), (300.0,)),
                system_initial=basis_state("0"))
    base.update(kwargs)
    with pytest.raises(ValidationError):
        ZenoProtocol(**base)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(100, 600),
    st.floats(-250, 250),
    st.floats(15000, 30000),
    st.floats(2e-7, 2e-6),
    st.floats(0, 6e-3),
    st.integers(0, 40),
)
def test_trace_invariants(delta, j01, p, tau, tau_m, n):
    sys = SpinSystem(1, couplings={(0, 1): j01})
    proto = ZenoProtocol(tau, tau_m, n, RfDrive((p,), (delta,)), basis_state("0"))
    trace = run_protocol(sys, h_meas_single(delta, j01), proto)
    assert trace.coherence[0] == pytest.approx(1.0)
    assert np.all(trace.coherence >= 0) and np.all(trace.coherence <= 1 + 1e-9)
    assert np.all(np.linalg.norm(trace.bloch, axis=-1) <= 1 + 1e-9)


def test_find_extrema():
    minima, maxima = find_extrema(np.array([1.0, 0.5, 0.8, 0.2, 0.9, 1.0]))
    assert list(minima) == [1, 3]
    assert list(maxima) == [2]
    assert find_extrema(np.array([1.0]))[0].size == 0
