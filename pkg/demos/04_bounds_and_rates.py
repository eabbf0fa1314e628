# # Error bounds against observed errors
#
# bound(n) = max(omega(h, d_n), m_2 / (phi(1)^2 n^2 d_n^2)) with d_n = n^(-2/3).
# omega is a grid estimate pushed upward by a fitted Lipschitz constant.

# +
from maxmin_nn import (
    BoxDomain,
    KernelProfile,
    absolute_moment,
    cosine_bump,
    empirical_order,
    evaluate_on_grid,
    jackson_bound,
    lipschitz_rate,
    sup_norm_error,
    table1,
)

profile = KernelProfile("logistic", 2)
m2 = absolute_moment(profile, 2.0, resolution=200)
print("m_2 =", m2.value, "(grid", m2.resolution, "per axis, lattice window", m2.lattice_window, ")")
print("predicted exponent", lipschitz_rate(2.0, 1.0).rate)
# -

# +
def sweep(kind, h, box, omega_box):
    samples = []
    for n in (10, 25, 50, 100, 200, 400):
        err = sup_norm_error(evaluate_on_grid(kind, h, n, box, profile, 101), h)
        rep = jackson_bound(h, n, n ** (-2 / 3), 2.0, profile, m2, omega_box, observed_error=err)
        samples.append((n, err))
        flag = "VIOLATED" if rep.violated else "ok"
        print(f"n={n:>4}  error {err:.5f}  bound {rep.bound:.5f}  ({flag})")
    print("empirical order", round(empirical_order(samples), 3))


unit = BoxDomain.cube(0, 1, 2)
sweep("max_min", table1(), unit, unit)
# -

# Quasi-interpolation on the whole plane: errors measured on [-2, 2]^2,
# omega taken over the wider box [-4, 4]^2

sweep("quasi_max_min", cosine_bump(), BoxDomain.cube(-2, 2, 2), BoxDomain.cube(-4, 4, 2))
