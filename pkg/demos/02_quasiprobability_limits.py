"""How the two-pointer quasi-probability moves between its two limits.

For |y+> with A = sigma_x first and B = sigma_z second, the table starts at
the Kirkwood-Dirac distribution (complex) for a weak first pointer and
settles on Wigner's joint probabilities (real, non-negative) for a strong one.
"""

import numpy as np

from succmeter import ket_projector, kirkwood, pauli, scan_epsilon, wigner_table

rho = ket_projector([1, 1j])
A, B = pauli("x"), pauli("z")

print("Kirkwood-Dirac:\n", np.round(kirkwood(rho, A, B), 4))
print("Wigner:\n", np.round(wigner_table(rho, A, B), 4))

print("\neps1/sigma  to Wigner   to Kirkwood   <Q1Q2>     <P1Q2>")
for pt in scan_epsilon(rho, A, B, 1.0, np.geomspace(1e-3, 10, 9)):
    print(f"{pt.table.epsilon1:10.3g}  {pt.distance_to_wigner:9.2e}  {pt.distance_to_kirkwood:11.2e}"
          f"  {pt.q1q2:+.5f}  {pt.p1q2:+.5f}")
