"""
Partial absorption of a Gaussian packet
=======================================

A packet launched at x = -x0 towards an absorbing wall at x = 0 is only
partly absorbed.  What is never absorbed is the reflection coefficient R,
the long-time limit of the survival probability.
"""

import numpy as np

from qabsorb import packet
from qabsorb.core import PhysicalParams

base = packet.GaussianPacketParams(width_a=1.0, x0=5.0, k0=5.0, params=PhysicalParams(lambda_left=1.0))
print(f"classical arrival time {base.arrival_time:.3f}")

res = packet.reflection_coefficient(base, full_output=True)
print(f"R = {res.reflection:.12f}  (tail bound {res.tail_bound:.1e}, integrated to t = {res.t_max:.3g})")

# a stiffer wall (larger lambda) absorbs more, but never everything
print("\n lambda        R")
for lam in np.geomspace(0.01, 10, 7):
    print(f"{lam:7.3f}   {packet.reflection_coefficient(base.with_lambda(lam)):.6e}")

# the absorption current peaks near the arrival time and decays as t^-3
t = np.linspace(0.0, 3.0, 13)
current = packet.boundary_flux_rate(t, base) * packet.survival(t, base)
print("\n   t     current")
for ti, ji in zip(t, current):
    print(f"{ti:5.2f}   {ji:.4e}")
