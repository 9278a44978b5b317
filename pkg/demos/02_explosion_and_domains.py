"""Blow-up detection and effective-domain probing.

For the scalar quadratic model the blow-up time is exactly 1/u, so the
bracketing machinery can be judged against the truth. The ray probe then
locates the largest multiple of a direction whose exponential moment stays
finite over a horizon.
"""

from affinejd import effective_domain_ray, explosion_time
from affinejd.golden import cir, squared_scalar

model = squared_scalar()
print("blow-up times of psi' = psi^2 (truth: 1/u)")
for u in (0.5, 1.0, 2.0, 5.0):
    res = explosion_time(model, [u], t_max=10.0)
    lo, hi = res.bracket
    print(f"  u={u:4.1f}: estimate {res.estimate:.9f}  bracket width {hi - lo:.2e}  truth {1/u}")
for u in (0.0, -1.0):
    res = explosion_time(model, [u], t_max=10.0)
    print(f"  u={u:4.1f}: {res.kind} (no blow-up before t={res.t_max})")

print("\neffective domain of the square-root model along u = lambda (truth: lambda* = 1/T)")
model = cir()
for horizon in (0.5, 1.0, 2.0):
    probe = effective_domain_ray(model, [1.0], horizon)
    print(f"  T={horizon:3.1f}: lambda* = {probe.lambda_star:.6f}  "
          f"bracket width {probe.bracket_width:.1e}  ({len(probe.probes)} probes)")

probe = effective_domain_ray(model, [-1.0], 1.0, lambda_max=64.0)
print(f"  direction -1: unbounded domain up to lambda_max (lambda* = {probe.lambda_star})")
