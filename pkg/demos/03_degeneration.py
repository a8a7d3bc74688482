"""Squeeze one weight until the tetrahedron flattens.

Starting at (1, 1, 1, 0.3) we shrink the last weight.  Q(1, 1, 1, x) vanishes
at x = 1 / (3 + 2 sqrt 3), and as we close in the solid angle at the small
vertex opens up to a full hemisphere while the other three close.
"""

import math

from yamabeflow import degeneration_probe

rep = degeneration_probe((1, 1, 1, 0.3), (0, 0, 0, -1))
x_star = 1.0 / (3.0 + 2.0 * math.sqrt(3.0))
print(f"boundary weight {rep.boundary_weights[3]:.15f}  (exact {x_star:.15f})")
print(f"{'rel Q':>8} {'alpha small':>14} {'2pi - it':>10} {'other max':>10} {'sum':>12}")
for delta, a in zip(rep.deltas, rep.alphas):
    other = max(a[:3])
    print(f"{delta:8.0e} {a[3]:14.10f} {2 * math.pi - a[3]:10.2e} {other:10.2e} {a.sum():12.9f}")
print(f"monotone approach: {rep.monotone}")
