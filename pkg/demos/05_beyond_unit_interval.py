# # Targets outside [0, 1]
#
# max-min only takes values in [0, 1].  A target that stays above 1 is run
# through 1/h, one in [-1, 0) through -h, one below -1 through -1/h, and the
# result is mapped back.

# +
import numpy as np

from maxmin_nn import (
    BoxDomain,
    KernelProfile,
    MixedRangeError,
    constant,
    evaluate_on_grid,
    expression,
    extended_max_min,
    sup_norm_error,
)

unit = BoxDomain.cube(0, 1, 1)
profile = KernelProfile("logistic", 1)
# -

for c in (3.0, -0.4, -7.0):
    print(c, extended_max_min(constant(c, 1, unit), 30, unit, profile, [0.42]))

h = expression("2+y1", 1, unit, range_class="bounded_general")
for n in (25, 50, 100, 200):
    f = evaluate_on_grid("extended_max_min", h, n, unit, profile, 101)
    print(f"n={n:>4}  regime {f.metadata['regime']}  sup error {sup_norm_error(f, h):.4f}")

# A target crossing 1 has no single transform

try:
    extended_max_min(expression("2*y1", 1, unit, range_class="bounded_general"), 10, unit, profile, [0.5])
except MixedRangeError as exc:
    print("rejected:", exc)
