"""
Screen patterns behind a slit
=============================

The wave leaving a slit factors into an x-packet moving toward the
absorbing screen and a y-profile spreading sideways.  The screen records
the time-integrated absorption current.  With absorbing side walls at
y = +-y0 the walls record a trace of their own.
"""

import numpy as np

from qabsorb import packet, slit

cfg = slit.SlitConfig()
y = np.linspace(-8, 8, 17)
cumulative = slit.cumulative_pattern(y, cfg)
concentrated = slit.concentrated_velocity_pattern(y, cfg)
scale = cumulative.density.max() / concentrated.density.max()
print(" y      cumulative   at arrival time (rescaled)")
for yi, c, f in zip(y, cumulative.density, concentrated.density * scale):
    print(f"{yi:5.1f}   {c:.4e}   {f:.4e}")

wide = np.linspace(-40, 40, 4001)
r = packet.reflection_coefficient(cfg.x_packet())
print(f"\npattern mass {slit.cumulative_pattern(wide, cfg).mass():.9f}, absorbed fraction 1 - R = {1 - r:.9f}")

# the brightness of the absorbed image fades after the arrival time
tb = cfg.t_bar * np.array([1.0, 1.5, 2.0, 3.0])
print("relative brightness:", np.array2string(slit.relative_brightness(tb, cfg), precision=3))

# a flat slit in a channel with absorbing side walls
channel = slit.SlitConfig(sigma_x=1 / np.sqrt(2), x0=5.0, v0=5.0, y0=2.0)
x = np.linspace(0, 10, 11)
wall = slit.lateral_wall_pattern(x, channel, n_max=100)
print("\n x     trace on the wall y = +y0")
for xi, d in zip(x, wall.density):
    print(f"{xi:4.1f}   {d:.4e}")
