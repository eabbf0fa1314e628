# # Error table for a smooth bowl
#
# Three operators approximate h(y1, y2) = (y1^2 + y2^2) / 2 on the unit
# square with the logistic kernel.  The sup error is read off a uniform grid.

# +
import numpy as np

from maxmin_nn import REFERENCE_ERRORS, KernelProfile, compare_operators, table1

h = table1()
profile = KernelProfile("logistic", 2)
ns = [20, 55, 77, 100, 150, 1000]
# -

# A 151-point grid per axis.  Keep it: on a 101-point grid every sample of
# the n = 100 and n = 1000 rows sits exactly on a lattice point k/n, where
# max-product is almost exact, so that column collapses.

# +
table = compare_operators(h, ns, h.domain, profile, grid=151)
print(table.format())

print("\nrelative deviation from the reference values")
for row, ref in zip(table.rows, REFERENCE_ERRORS):
    dev = np.abs(np.array(row[1:]) - ref[1:]) / ref[1:]
    print(f"n={row[0]:>5}  " + "  ".join(f"{d:7.2%}" for d in dev))
# -

# Same columns on the 101 grid, for contrast

coarse = compare_operators(h, [100, 1000], h.domain, profile, grid=101)
print(coarse.format())
