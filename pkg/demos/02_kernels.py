# # What the kernels look like
#
# phi(y) = (mu(y+1) - mu(y-1)) / 2 is a bump; its tensor product rho is the
# weight each lattice sample gets.  Curves go to CSV for plotting elsewhere.

# +
from pathlib import Path

import numpy as np

from maxmin_nn import KernelProfile, catalog, phi, rho, truncation_radius
from maxmin_nn.kernel import KernelDecayError

out = Path("demo_output")
out.mkdir(exist_ok=True)
# -

# Peak, value one step away, and the window radius outside which the kernel
# is below 1e-15 (power tails never get there).

for act in catalog():
    try:
        w = f"{truncation_radius(act, 2, 1e-15):8.3f}"
    except KernelDecayError:
        w = "     inf"
    print(f"{act.name:28s} phi(0)={phi(act, 0.0):.6f}  phi(1)={phi(act, 1.0):.6f}  W={w}")

# The ramp bump reaches all the way to |y| = 1.5, not 1

ramp = catalog()[2]
ys = np.array([0.9, 1.0, 1.2, 1.49, 1.5, 1.6])
print(dict(zip(ys.tolist(), phi(ramp, ys).round(4).tolist())))

# +
# power tails with gamma = 0.4 and 0.8, rho on [-4, 4]^2
axis = np.linspace(-4, 4, 81)
Y1, Y2 = np.meshgrid(axis, axis, indexing="ij")
pts = np.stack([Y1, Y2], axis=-1)
for gamma in (0.4, 0.8):
    prof = KernelProfile(f"power_tail:gamma={gamma}", 2, tail_epsilon=1e-3)
    R = rho(prof, pts)
    np.savetxt(out / f"rho_power_tail_{gamma}.csv", np.column_stack([Y1.ravel(), Y2.ravel(), R.ravel()]),
               delimiter=",", header="y1,y2,rho", comments="")
    print(gamma, "peak", R.max(), "= phi(0)^2", prof.phi0**2)
# -
