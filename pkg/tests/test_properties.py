import numpy as np
import pytest

from maxmin_nn import BoxDomain, build_lattice, lattice_target, run_suite


class TestSuites:
    def test_default_logistic_passes(self):
        rep = run_suite("logistic", seed=0, trials=200)
        assert rep.passed, "\n".join(rep.lines())

    def test_seeded_determinism(self):
        a = run_suite("tanh", seed=7, trials=100)
        b = run_suite("tanh", seed=7, trials=100)
        assert a.lines() == b.lines()

    def test_gompertz_reports_condition_a(self):
        rep = run_suite("gompertz", seed=0, trials=50)
        cond = {r.name: r for r in rep.results}
        assert not cond["condition (a)"].passed and cond["condition (a)"].informational
        assert cond["B3 pseudo-linear"].passed
        assert rep.passed

    @pytest.mark.parametrize("act", ["ramp", "three_step", "power_tail:gamma=0.8"])
    def test_other_catalog_entries(self, act):
        assert run_suite(act, seed=1, trials=50).passed

    def test_lattice_target_samples(self):
        dom = BoxDomain.cube(0, 1, 2)
        lat = build_lattice(4, dom)
        vals = np.arange(25.0).reshape(5, 5) / 25
        h = lattice_target(vals, 4, lat, dom)
        pts = lat.points() / 4
        np.testing.assert_array_equal(h(pts), vals.ravel())
