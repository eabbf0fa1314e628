import json
import math

import numpy as np
import pytest

from maxmin_nn import (
    BoxDomain,
    ErrorTable,
    KernelProfile,
    MomentInfiniteError,
    absolute_moment,
    compare_operators,
    constant,
    empirical_order,
    estimate_modulus,
    evaluate_on_grid,
    expression,
    identity,
    jackson_bound,
    lipschitz_rate,
    modulus_of_continuity,
    sup_norm_error,
    table1,
)

UNIT1 = BoxDomain.cube(0.0, 1.0, 1)
UNIT2 = BoxDomain.cube(0.0, 1.0, 2)


class TestSupNorm:
    def test_zero_and_offset(self, logistic2):
        c = constant(0.4, 2, UNIT2)
        f = evaluate_on_grid("max_min", c, 10, UNIT2, logistic2, 11)
        assert sup_norm_error(f, c) == 0.0
        assert sup_norm_error(f, constant(0.5, 2, UNIT2)) == pytest.approx(0.1, abs=1e-15)

    def test_mismatch(self, logistic2):
        f = evaluate_on_grid("max_min", table1(), 10, UNIT2, logistic2, 5)
        with pytest.raises(ValueError):
            sup_norm_error(f, identity(1))
        with pytest.raises(ValueError):
            sup_norm_error(f, table1().on(BoxDomain.cube(0.0, 0.5, 2)))


class TestModulus:
    def test_identity(self):
        assert modulus_of_continuity(identity(1), UNIT1, 0.1, 401) == pytest.approx(0.1, abs=1e-12)

    def test_constant(self):
        assert modulus_of_continuity(constant(0.2, 2, UNIT2), UNIT2, 0.1, 41) == 0.0

    def test_table1_diagonal(self):
        exact = math.sqrt(2) * 0.1 - 0.1**2 / 2
        est = estimate_modulus(table1(), UNIT2, 0.1, 401)
        spacing = 1 / 400
        assert est.lower <= exact + 1e-12
        # the grid misses the extremal pair by at most one cell
        assert exact - est.lower <= 2 * spacing
        assert est.upper >= exact

    def test_monotone_in_delta(self):
        h = expression("sin(3*y1)*cos(2*y2)/2+0.5", 2, UNIT2)
        vals = [modulus_of_continuity(h, UNIT2, d, 201) for d in (0.02, 0.05, 0.1, 0.2)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_lipschitz_class(self):
        # |sqrt(x) - sqrt(y)| <= |x - y|^(1/2)
        h = expression("abs(y1)^0.5", 1, UNIT1)
        for d in (0.01, 0.04, 0.25):
            assert modulus_of_continuity(h, UNIT1, d, 2001) <= d**0.5 + 1e-12

    def test_too_coarse(self):
        with pytest.raises(ValueError, match="too coarse"):
            modulus_of_continuity(identity(1), UNIT1, 0.1, 11)


class TestRates:
    def test_lipschitz_rate(self):
        assert lipschitz_rate(1, 1).rate == 0.5
        assert lipschitz_rate(2, 1) == pytest.approx((2 / 3, 2 / 3))
        assert lipschitz_rate(1e9, 1).rate == pytest.approx(1.0, abs=1e-8)
        with pytest.raises(ValueError):
            lipschitz_rate(1, 1.5)

    def test_empirical_order(self):
        assert empirical_order([(10, 1e-1), (100, 1e-2), (1000, 1e-3)]) == pytest.approx(1.0)
        # reference error-table entries at n = 100 and n = 1000
        assert empirical_order([(100, 0.022911), (1000, 0.0023175)]) == pytest.approx(0.995, abs=1e-3)
        assert empirical_order([(100, 0.020389), (1000, 0.0020606)]) == pytest.approx(0.995, abs=1e-3)
        with pytest.raises(ValueError):
            empirical_order([(10, 0.0), (20, 0.1)])
        with pytest.raises(ValueError):
            empirical_order([(10, 0.1), (10, 0.2)])

    def test_moment_term_scaling(self, logistic2):
        m = absolute_moment(logistic2, 2.0)
        h = table1()
        a = jackson_bound(h, 100, 0.05, 2.0, logistic2, m)
        b = jackson_bound(h, 1000, 0.05, 2.0, logistic2, m)
        assert b.moment_term == pytest.approx(a.moment_term / 100, rel=1e-12)
        assert a.bound == max(a.omega_term, a.moment_term)

    def test_bound_slope(self, logistic2):
        # with the optimal delta_n the moment term decays like n^(-2/3)
        m = absolute_moment(logistic2, 2.0)
        ns = np.array([1e2, 1e3, 1e4])
        terms = [m.bound_value / (logistic2.lower_bound * n**2 * (n ** (-2 / 3)) ** 2) for n in ns]
        slope = -np.polyfit(np.log(ns), np.log(terms), 1)[0]
        assert abs(slope - 2 / 3) < 0.05

    def test_bound_at_n100(self, logistic2):
        h = table1()
        f = evaluate_on_grid("max_min", h, 100, UNIT2, logistic2, 101)
        rep = jackson_bound(h, 100, 100 ** (-2 / 3), 2.0, logistic2, absolute_moment(logistic2, 2.0),
                            observed_error=sup_norm_error(f, h))
        assert rep.bound >= 0.020389 and not rep.violated
        data = json.loads(rep.to_json())
        assert {"n", "delta_n", "omega_term", "moment_term", "bound", "observed_error"} <= set(data)

    def test_alpha_beyond_decay(self):
        prof = KernelProfile("power_tail:gamma=0.4", 1, 1e-3)
        m = absolute_moment(prof, 0.4, 50)
        with pytest.raises(MomentInfiniteError):
            jackson_bound(identity(1), 10, 0.1, 0.8, prof, m)


class TestErrorTable:
    def test_constant_target(self, logistic2):
        t = compare_operators(constant(0.5, 2, UNIT2), [5, 10], UNIT2, logistic2, grid=11)
        assert max(max(row[1:]) for row in t.rows) <= 1e-14

    def test_csv(self):
        t = ErrorTable([(10, 0.1, 0.05, 0.08), (20, 0.05, 0.02, 0.04)])
        assert t.to_csv().splitlines()[0] == "n,classical,max_product,max_min"
        assert t.column("max_min") == [0.08, 0.04]
        with pytest.raises(ValueError):
            ErrorTable([(20, 0, 0, 0), (10, 0, 0, 0)])
