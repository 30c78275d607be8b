"""A single Gaussian-pointer measurement of sigma_z on |+>.

The pointer ends up in a two-peak mixture. Its mean tracks <A> at every
coupling, while the coherence between the two outcomes decays as the peaks
separate.
"""

import numpy as np

from succmeter import GaussianMeter, ket_projector, pauli, pointer_density, reduced_state_after

rho = ket_projector([1, 1])
A = pauli("z")

print("eps/sigma   <Q>/eps   |rho_01| after")
for eps in (0.1, 1.0, 3.0, 10.0):
    meter = GaussianMeter(sigma_q=1.0, epsilon=eps)
    dens = pointer_density(rho, A, meter)
    after = reduced_state_after(rho, A, meter)
    print(f"{eps:9.1f}   {dens.mean / eps:7.4f}   {abs(after[0, 1]):.3e}")

# The pointer distribution itself, sampled coarsely.
meter = GaussianMeter(1.0, 3.0)
dens = pointer_density(rho, A, meter)
q = np.linspace(-6, 6, 13)
for x, p in zip(q, dens(q)):
    print(f"Q={x:+5.1f}  {'#' * int(round(60 * p))}")
