"""
How good is the closed-form channel?
====================================

The estimator relies on a closed form in which the combined receive signal
is ``e^{ikr}/r * e^{il gamma} J_l(k R sin theta) J_0(k R sin theta)``. It
assumes both many ring elements and a far-field range. Here we compare
it against the direct Green's-function sum over every element pair.
"""

import numpy as np

from oamaoa import LinkGeometry, MisalignmentPose
from oamaoa.channel import combined_exact, field_approx_element, field_exact_element, received_combined
from oamaoa.geometry import element_positions

R = 10 * 2 * np.pi / 47
phi = theta = np.deg2rad(7.0)


def worst_phase_error(n, r):
    geom = LinkGeometry.symmetric(n, R, MisalignmentPose(r, phi, theta))
    pos = element_positions(geom)
    errs = [abs(np.angle(combined_exact(geom, m, k, positions=pos) / received_combined(geom, m, k)))
            for m in range(-4, 4) for k in range(47, 55)]
    return max(errs)


# Two things break the closed form at the default point. With nine
# elements the ring sum aliases J_{l +- 9} into every mode, and 40 m is inside
# the 2 D^2 / lambda ~ 107 m Fraunhofer distance of a 2.7 m aperture.
for n in (9, 32):
    for r in (40.0, 400.0, 4e4):
        print(f"N = {n:>2}, r = {r:>7.0f} m: worst combined-signal phase error {worst_phase_error(n, r):.3g} rad")

# Per element, the exact field approaches the closed form once both limits hold.
geom = LinkGeometry.symmetric(32, R, MisalignmentPose(1e6, phi, theta))
exact = field_exact_element(geom, 2, 50.0)
approx = field_approx_element(geom, 2, 50.0)
print(f"N = 32, r = 1e6 m, mode 2: max relative difference {np.max(np.abs(exact / approx - 1)):.2e}")
