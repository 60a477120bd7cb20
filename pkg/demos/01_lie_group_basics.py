"""Tour of the SO(3)/SE(3) primitives: hat/vee, exp/log, adjoint, metric.

Run with: python3 demos/01_lie_group_basics.py
"""

import numpy as np

from bundleobs import AlgebraElement, Metric, adjoint, exp, hat, inner, log, vee
from bundleobs.sampling import random_algebra, random_rotation, rng_from

rng = rng_from(42)

# A rotation rate of 0.3 rad/s about a tilted axis, as an algebra element.
omega = hat([0.1, -0.2, 0.3])
print("omega matrix (antisymmetric):")
print(omega.matrix)
print("vee recovers the coordinates exactly:", vee(omega))

# Exponentiate to a rotation and come back with the principal log.
R = exp(omega)
print("\nexp(omega) is a rotation, det =", np.linalg.det(R.matrix))
print("log(exp(omega)) roundtrip error:", np.linalg.norm(log(R).vec - omega.vec))

# SE(3): coordinates are (linear, angular). The exponential uses the
# closed-form left Jacobian for the translation block.
xi = hat([1.0, 0.5, -0.2, 0.1, -0.2, 0.3])
g = exp(xi)
print("\nSE(3) exponential:")
print(g.matrix.round(4))
print("roundtrip error:", np.linalg.norm(log(g).vec - xi.vec))

# The adjoint is conjugation; the bi-invariant metric does not see it.
m = Metric()
h = random_rotation(rng)
z, w = random_algebra("so3", rng), random_algebra("so3", rng)
print("\nmetric is Ad-invariant:",
      abs(inner(m, adjoint(h, z), adjoint(h, w)) - inner(m, z, w)))
