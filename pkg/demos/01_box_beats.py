"""
Beats in the survival of a two-level box state
==============================================

A particle in a box [0, a] with an absorbing wall at x = 0 leaks out at a
rate set by the wall flux |d psi/dx|^2.  For a superposition of two levels
the flux oscillates at the Bohr frequency, so the survival curve shows beats.
"""

import numpy as np

from qabsorb import PhysicalParams, TimeGrid
from qabsorb import box_modes
from qabsorb.absorption import survival_from_flux

# equal mixture of the two lowest modes, normalized on [0, 1]
params = PhysicalParams(lambda_left=0.2)
state = box_modes.BoxExpansion(1.0, [1, 2], [1.0, 1.0], params)
omega = box_modes.beat_frequency(1, 2, 1.0, params)
print(f"Bohr frequency {omega:.4f}, beat period {2 * np.pi / omega:.4f}")

grid = TimeGrid.spanning(4 * np.pi / omega, 1e-4)
survival = survival_from_flux(box_modes.flux_series(state, grid), params)

# the flux law integrates in closed form for two real amplitudes
closed = box_modes.two_level_survival(1, 2, 1.0, 1.0, grid.times, params, 1.0)
print(f"largest gap between quadrature and closed law: {np.max(np.abs(survival.values / closed - 1)):.2e}")

for t in np.linspace(0, grid.t_end, 9):
    s = survival.at(t)
    print(f"  t = {t:6.3f}   S = {s:.6f}   " + "#" * int(60 * s))

# energy-window absorption damps each mode on its own clock instead
window = box_modes.energy_window_survival(state.spectrum(), grid.times, params, 1.0)
print(f"\nat t = {grid.t_end:.3f}: flux law S = {survival.values[-1]:.4f}, energy window S = {window[-1]:.4f}")
