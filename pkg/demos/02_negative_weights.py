"""A tetrahedron whose Laplacian has negative weights.

With weights (1, 1, 1, 1/5) the three unit vertices pull on each other with
negative coefficients, so the curvature operator is not parabolic in the
usual sense.  We show the coefficient table, check it against the closed
form built from face perimeters and the volume, and then glue two copies into
a double tetrahedron to see that the max/min derivative test still holds.
"""

import numpy as np

from yamabeflow import classify_operator, hessian_spectrum, omega_sign_audit, preset
from yamabeflow.geometry import face_geometry, nondegeneracy_q, omega_block, volume

r = np.array([1.0, 1.0, 1.0, 0.2])
print(f"weights {r.tolist()}, Q = {nondegeneracy_q(r):g}")

om = omega_block(r).omega
print("Omega[a, b] = d(alpha_a)/d(r_b) * r_b:")
for row in om:
    print("   " + " ".join(f"{x:+.6f}" for x in row))

P, _ = face_geometry(r)
closed = -8.0 / (75.0 * P[3] * P[2] * volume(r))
print(f"closed form for the unit pair: {closed:+.12f}  (table: {om[0, 1]:+.12f})")

audit = omega_sign_audit(r)
print(f"negative pairs {audit.negative_pairs}; both weights of each exceed the minimum: {audit.ok}")

spec = hessian_spectrum(r)
print("spectrum of d(alpha)/dr:", np.array2string(spec.eigenvalues, precision=6))

c, m = preset("double_tetrahedron")
cls = classify_operator(c, m.from_array(c.vertices, r))
print(f"double tetrahedron: parabolic={cls.parabolic}, negative edges {cls.negative_edges}")
print(f"  K = {np.round(cls.K, 6).tolist()}")
print(f"  dK/dt = {np.round(cls.dK_dt, 6).tolist()}")
print(f"  max K not increasing and min K not decreasing: {cls.parabolic_like_for_K}")
