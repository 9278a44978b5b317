"""The exponential-moment transform and its three-way domain semantics.

Depending on the argument, E_x exp(u.X_t) is a finite number, infinite
(real u past the blow-up time), or identically zero (non-real u with
bounded real part whose Riccati solution blows up by t). The planar
fixture with indefinite diffusion exercises the zero region: in
v = u_1 + i u_2 its equation is v' = v^2 / 2, blowing up at t = 2/v(0).
"""

import numpy as np

from affinejd import transform
from affinejd.golden import cir, nonadmissible_2d

model = cir()
print("square-root model at x=1:")
for u, t in ((0.0, 1.0), (0.5, 1.0), (2.0, 1.0), (0.5j, 1.0)):
    tv = transform(model, [u], [1.0], t)
    val = f"{tv.value:.6f}" if tv.value is not None else "-"
    print(f"  u={u!s:6} t={t}: {tv.kind:11s} value={val}")
print(f"  (u=0.5 truth: 2e = {2*np.e:.6f}; u=2 blows up at t=0.5 < 1)")

fixture = nonadmissible_2d()
print("\nplanar fixture, u=(0,-i) so v(0)=1 and the blow-up time is 2:")
for t in (1.5, 2.5, 4.0):
    tv = transform(fixture, [0.0, -1.0j], [0.3, -0.2], t)
    val = f"{tv.value:.6f}" if tv.value is not None else "-"
    print(f"  t={t}: {tv.kind:11s} value={val}")

print("\nu=(1.5, 0.5i) also blows up, but it is neither real nor in U:")
tv = transform(fixture, [1.5, 0.5j], [0.0, 0.0], 2.5)
print(f"  t=2.5: {tv.kind} ({tv.diagnostic})")
