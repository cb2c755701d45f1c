"""Protecting |phi+> = (|01> + |10>)/sqrt(2) with an entangling measurement.

Two XXX-coupled system spins share the same shift and the same coupling
to the apparatus, so the measurement commutes with their own Hamiltonian
and |phi+> is one of its non-degenerate eigenstates. Away from the
critical time the measurements pin the pair there; at the critical time
the RF kicks add up and the pair wanders off.

    python demos/02_entanglement.py
"""

import numpy as np

from dynzeno import engine
from dynzeno.hamiltonians import h_s_xxx
from dynzeno.operators import basis_state, state_fidelity, to_density
from dynzeno.states import PHI_PLUS, eigencheck_phi_plus, phi_plus_circuit, pps, prepare_phi_plus
from dynzeno.scenarios import entangled_state

# Gate sequence: NOT, Hadamard, CNOT turn |00> into |phi+>.
prepared = phi_plus_circuit() @ basis_state("00")
print(f"|<phi+|circuit|00>| = {abs(np.vdot(PHI_PLUS, prepared)):.12f}")

# Pseudo-pure input: only the epsilon-weighted part is rotated.
rho = prepare_phi_plus(pps(1e-5))
print(f"pseudo-pure deviation weight on |0,phi+>: {np.real(np.kron([1, 0], PHI_PLUS) @ rho @ np.kron([1, 0], PHI_PLUS)) - (1 - 1e-5) / 8:.3e}")

check = eigencheck_phi_plus(h_s_xxx(200, 100))
print(f"phi+ eigenvalue {check.eigenvalue / (2 * np.pi):.1f} Hz (x 2 pi), gap {check.gap / (2 * np.pi):.1f} Hz")

sc = entangled_state()
t_crit = engine.critical_time_xxx(200, 250, "+", 1)
for tau_m in (3.7e-3, t_crit):
    tr = engine.run_protocol(sc.system, sc.h_meas, sc.protocol(tau_m, 100))
    k = int(np.argmin(tr.fidelity))
    final = state_fidelity(tr.system_states[-1], to_density(PHI_PLUS))
    print(
        f"tau_m={tau_m * 1e3:.4f} ms: min fidelity {tr.fidelity.min():.4f} at k={k}, "
        f"after 100 cycles {final:.4f}, min D {tr.coherence.min():.3f}"
    )
