import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxmin_nn import (
    BoxDomain,
    ExpressionError,
    LatticeError,
    RangeViolation,
    build_lattice,
    constant,
    cosine_bump,
    expression,
    identity,
    parse_target,
    table1,
    uniform_grid,
)


class TestLattice:
    def test_full_box(self):
        lat = build_lattice(2, BoxDomain.cube(0, 1, 1))
        np.testing.assert_array_equal(lat.axis(0), [0, 1, 2])
        assert build_lattice(20, BoxDomain.cube(0, 1, 2)).shape == (21, 21)

    def test_empty_axis(self):
        with pytest.raises(LatticeError, match="n too small for domain"):
            build_lattice(3, BoxDomain(((0.4, 0.6),)))
        with pytest.raises(LatticeError, match="n too small for domain"):
            build_lattice(1, BoxDomain.cube(0.4, 0.6, 2))

    def test_snapping(self):
        lat = build_lattice(10, BoxDomain(((0.3, 0.7),)))
        assert lat.ranges == ((3, 7),)

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(1, 500),
        st.floats(-5, 5, allow_nan=False),
        st.floats(0.05, 5, allow_nan=False),
    )
    def test_points_lie_in_domain(self, n, a, w):
        dom = BoxDomain(((a, a + w),))
        try:
            lat = build_lattice(n, dom)
        except LatticeError:
            assert np.floor(n * (a + w) + 1e-9) < np.ceil(n * a - 1e-9)
            return
        pts = lat.points() / n
        assert np.all(dom.contains(pts, slack=1e-9))
        # nothing just outside the box was missed
        lo, hi = lat.ranges[0]
        assert not dom.contains(np.array([[(lo - 1) / n]]), slack=-1e-9)[0]
        assert not dom.contains(np.array([[(hi + 1) / n]]), slack=-1e-9)[0]

    def test_domain_parse_and_validation(self):
        d = BoxDomain.parse("0,1,-2,2")
        assert d.dimension == 2 and str(d) == "[0,1] x [-2,2]"
        with pytest.raises(ValueError):
            BoxDomain.parse("0,1,2")
        with pytest.raises(ValueError):
            BoxDomain(((1, 0),))
        with pytest.raises(ValueError):
            BoxDomain(((0, np.inf),))

    def test_uniform_grid(self):
        ax = uniform_grid(BoxDomain.cube(0, 1, 2), 3)
        np.testing.assert_array_equal(ax[0], [0, 0.5, 1])
        with pytest.raises(ValueError):
            uniform_grid(BoxDomain.cube(0, 1, 1), 1)


class TestTargets:
    def test_builtins(self):
        h = table1()
        assert h(np.array([1.0, 1.0])) == 1.0
        assert identity(1)(np.array([[0.25]]))[0] == 0.25
        assert cosine_bump().on_whole_space
        np.testing.assert_allclose(cosine_bump()(np.zeros(2)), 0.75)

    def test_range_violation_points_to_extension(self):
        h = expression("2*y1", 1)
        with pytest.raises(RangeViolation, match="extended_max_min"):
            h(np.array([[0.9]]))

    def test_expression_language(self):
        h = expression("(sin(pi*y1)^2 + abs(y2-0.5) + exp(-y1))/3", 2)
        p = np.array([0.3, 0.1])
        want = (np.sin(np.pi * 0.3) ** 2 + 0.4 + np.exp(-0.3)) / 3
        assert abs(h(p) - want) < 1e-15

    @pytest.mark.parametrize(
        "text", ["__import__('os')", "y3", "y1.real", "lambda: 1", "[y1]", "y1 if y1 else 0"]
    )
    def test_expression_rejects(self, text):
        with pytest.raises(ExpressionError):
            expression(text, 2)

    def test_parse_target(self):
        t = parse_target("const:0.3", 2, BoxDomain.cube(0, 1, 2))
        assert t(np.zeros((4, 2))).tolist() == [0.3] * 4
        assert constant(3.0).range_class == "bounded_general"
        assert parse_target("table1").dimension == 2
        with pytest.raises(ExpressionError):
            parse_target("const:x")
