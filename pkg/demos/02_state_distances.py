"""State distances: trace norm, fidelity, and the Helstrom measurement.

The trace distance measures single-shot distinguishability: given rho_0 or
rho_1 with equal probability, the best measurement guesses correctly with
probability 1/2 + ||rho_0 - rho_1||_tr / 4.
"""

import numpy as np

from qcdist import fidelity, fidelity_via_purification, helstrom, trace_norm

rng = np.random.default_rng(0)

zero = np.diag([1.0, 0.0]).astype(complex)
maximally_mixed = np.eye(2, dtype=complex) / 2

t = trace_norm(zero - maximally_mixed)
f = fidelity(zero, maximally_mixed)
print(f"trace distance |0><0| vs I/2 : {t}")
print(f"fidelity                     : {f}  (= 1/sqrt 2)")

# Fuchs-van de Graaf sandwich: 1 - t/2 <= F <= sqrt(1 - t^2/4).
print(f"bounds: {1 - t / 2:.6f} <= {f:.6f} <= {np.sqrt(1 - t * t / 4):.6f}")

# The Helstrom projector achieves the optimal guessing probability; with
# trace distance 1 that is exactly 3/4.
measurement, value = helstrom(zero - maximally_mixed)
success = 0.5 * np.trace(measurement @ zero).real + 0.5 * (
    1 - np.trace(measurement @ maximally_mixed).real
)
print(f"Helstrom success probability : {success}  (trace norm {value})")

# Fidelity can also be read off any two purifications: trace out the
# system factor of |psi><phi| and take the trace norm.
g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
rho = g @ g.conj().T
rho /= np.trace(rho).real
w, v = np.linalg.eigh(rho)
psi = sum(np.sqrt(w[i]) * np.kron(v[:, i], np.eye(2)[:, i]) for i in range(2))
print("\npurification route agrees with the direct formula:")
print(fidelity_via_purification(psi, psi, (2, 2)), "vs", fidelity(rho, rho))
