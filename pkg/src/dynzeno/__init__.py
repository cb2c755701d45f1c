"""Simulation of the dynamic, entanglement-based quantum Zeno effect in NMR registers.

Submodules:

``operators``    spin operators, exponentials, apparatus blocks, fidelities
``hamiltonians`` natural, RF and measurement Hamiltonians
``states``       pseudopure and pseudo-entangled initial states
``engine``       the ``[M U]^N`` protocol, critical times and regime labels
``appendix``     first-order Dirichlet-kernel approximations
``grape``        piecewise-constant pulse optimisation
``scenarios``    the three experimental registers with their defaults
"""

from .engine import (
    Regime,
    ZenoProtocol,
    ZenoTrace,
    apply_decay,
    classify_regime,
    coherence,
    critical_time_pps,
    critical_time_single,
    critical_time_xxx,
    phase_shift,
    run_protocol,
)
from .hamiltonians import RfDrive, SpinSystem, h_free, h_meas_pps, h_meas_single, h_meas_xxx, h_nmr
from .operators import ValidationError, expm_unitary, spin_op, state_fidelity

__version__ = "0.1.0"

__all__ = [
    "Regime",
    "RfDrive",
    "SpinSystem",
    "ValidationError",
    "ZenoProtocol",
    "ZenoTrace",
    "apply_decay",
    "classify_regime",
    "coherence",
    "critical_time_pps",
    "critical_time_single",
    "critical_time_xxx",
    "expm_unitary",
    "h_free",
    "h_meas_pps",
    "h_meas_single",
    "h_meas_xxx",
    "h_nmr",
    "phase_shift",
    "run_protocol",
    "spin_op",
    "state_fidelity",
]
