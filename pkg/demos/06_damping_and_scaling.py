"""Jump damping and the parameter-scaling identity.

Damping multiplies every jump weight by exp(-|z|^2/n) and shifts the drift
by the induced compensator change; as n grows the damped transforms
converge to the undamped value. The scaling identity relates the solution
of the system with parameters (a, n A, scaled jumps) started at u to 1/n
times the base solution started at n u; a small residual supports infinite
divisibility of the marginal laws.
"""

import numpy as np

from affinejd import damped_model, infinite_divisibility_check, transform
from affinejd.golden import cir, compound_poisson, ou
from affinejd.transform import damped_transform_sequence

model = compound_poisson()
u = np.array([-1.0 + 2.0j])
undamped = transform(model, u, [1.0], 1.0)
print(f"undamped transform at u={u[0]}: {undamped.value:.8f}")
diag = damped_transform_sequence(model, u, [1.0], 1.0, [10, 100, 1000])
for n, v in zip(diag.n_list, diag.values):
    print(f"  n={n:5d}: {v:.8f}   |error| = {abs(v - undamped.value):.2e}")
print(f"  successive differences: {[f'{d:.2e}' for d in diag.cauchy_diffs]}")

d = damped_model(model, 10)
print(f"\ndamped model at n=10: weights {d.K[0].weights.round(6)} "
      f"(from {model.K[0].weights}), drift {d.a0.round(6)} (from {model.a0})")

print("\nparameter-scaling residuals (should sit at solver accuracy):")
for name, m, u0, t in (("square-root", cir(), 0.2, 0.4), ("gaussian", ou(), 0.5, 0.8)):
    for n in (2, 5, 10):
        res = infinite_divisibility_check(m, [u0], t, n)
        print(f"  {name:11s} n={n:2d}: residual {res:.2e}")
