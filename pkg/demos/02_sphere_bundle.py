"""The punctured-R^3 bundle: Givens cross-section and velocity splitting.

Every q != 0 is written as q = r R e1 with r = |q| the base (orbit)
coordinate and R a canonical rotation built from two Givens rotations.
A velocity then splits into a radial rate (horizontal, descends to the
base) and a body rotation rate (vertical, moves along the orbit).

Run with: python3 demos/02_sphere_bundle.py
"""

import numpy as np

from bundleobs import givens_section, reduce_system, sphere_bundle, sphere_split
from bundleobs.actions import R3, Point
from bundleobs.systems import sphere_vector_field

q = np.array([3.0, 4.0, 0.0])
r, R = givens_section(q)
print(f"q = {q}, radius r = {r}")
print("R e1 =", R.matrix @ np.array([1.0, 0.0, 0.0]))
print("reconstruction |q - r R e1| =", np.linalg.norm(q - r * R.matrix[:, 0]))

# Split a velocity: purely radial motion has no vertical part.
v_radial = q / np.linalg.norm(q)
hor, ver = sphere_split(q, v_radial)
print(f"\nradial velocity: hor = {hor:.3f}, |ver| = {ver.norm():.2e}")

# A generic velocity mixes both; the pieces rebuild it exactly.
v = np.array([0.5, -1.0, 0.8])
hor, ver = sphere_split(q, v)
rebuilt = hor * R.matrix[:, 0] + r * R.matrix @ ver.matrix[:, 0]
print(f"generic velocity: hor = {hor:.3f}, ver = {ver.vec}")
print("rebuild error:", np.linalg.norm(rebuilt - v))

# reduce_system gives the same split through the cross-section machinery.
sb = sphere_bundle()
base_rate, fiber_rate = reduce_system(
    lambda p, u: sphere_vector_field(p, u), sb, Point(R3, q), v
)
print("\nreduce_system agrees: base", abs(base_rate - hor),
      "fiber", np.linalg.norm(fiber_rate.vec - ver.vec))
