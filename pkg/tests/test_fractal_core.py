import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracdirac.errors import ArgumentError, DomainError
from fracdirac.fractal_core import ScalingModel, falpha_integral, make_uniform_grid, staircase_eval

from conftest import HALF_POW_08, PI_POW_08

alphas = st.floats(min_value=0.05, max_value=1.0)


@pytest.mark.parametrize("alpha", [0.0, -0.5, 1.0000001, float("nan")])
def test_scaling_index_rejects_out_of_range(alpha):
    with pytest.raises(DomainError):
        ScalingModel(alpha)


@pytest.mark.parametrize(
    "x, alpha, expected",
    [(0.0, 0.8, 0.0), (1.0, 0.8, 1.0), (math.pi, 1.0, math.pi), (0.5, 0.8, HALF_POW_08)],
)
def test_staircase_eval(x, alpha, expected):
    assert staircase_eval(x, ScalingModel(alpha)) == pytest.approx(expected, rel=1e-15, abs=0)


def test_staircase_rejects_negative():
    with pytest.raises(DomainError):
        staircase_eval(-1e-3, ScalingModel(0.9))


@given(alphas, st.floats(0, 1e3), st.floats(1e-3, 1e3))
def test_staircase_strictly_increasing(alpha, x, dx):
    model = ScalingModel(alpha)
    assert model.staircase(x) < model.staircase(x + dx)


@given(st.floats(0, 1e6))
def test_identity_at_alpha_one(x):
    assert staircase_eval(x, ScalingModel(1.0)) == x


@given(alphas, st.floats(1e-6, 1e3))
def test_inverse_roundtrip(alpha, x):
    model = ScalingModel(alpha)
    assert model.inverse(model.staircase(x)) == pytest.approx(x, rel=1e-12)


def test_uniform_grid_alpha_one():
    g = make_uniform_grid(0, math.pi, 2, ScalingModel(1.0))
    np.testing.assert_allclose(g.nodes, [0, math.pi / 2, math.pi], rtol=0, atol=0)
    np.testing.assert_allclose(g.gaps, [math.pi / 2, math.pi / 2], rtol=1e-15)


def test_uniform_grid_sqrt():
    g = make_uniform_grid(0, 1, 2, ScalingModel(0.5))
    np.testing.assert_allclose(g.staircase_nodes, [0, 0.7071067811865476, 1], rtol=1e-15)


def test_minimal_grid():
    g = make_uniform_grid(0, math.pi, 1, ScalingModel(1.0))
    assert list(g.nodes) == [0.0, math.pi]
    assert g.a == 0.0 and g.b == math.pi


@pytest.mark.parametrize("a, b, steps", [(1, 1, 4), (2, 1, 4), (0, 1, 0)])
def test_grid_argument_errors(a, b, steps):
    with pytest.raises(ArgumentError):
        make_uniform_grid(a, b, steps, ScalingModel(1.0))


@given(alphas, st.integers(1, 300))
def test_grid_gaps_positive(alpha, steps):
    g = make_uniform_grid(0, math.pi, steps, ScalingModel(alpha))
    assert np.all(g.gaps > 0)
    np.testing.assert_array_equal(g.staircase_nodes, ScalingModel(alpha).staircase(g.nodes))


def test_integral_of_one():
    for steps in (1, 7, 64):
        g = make_uniform_grid(0, math.pi, steps, ScalingModel(1.0))
        assert falpha_integral(g, np.ones(steps + 1)) == pytest.approx(math.pi, rel=1e-15)
    g = make_uniform_grid(0, math.pi, 50, ScalingModel(0.8))
    assert falpha_integral(g, np.ones(51)) == pytest.approx(PI_POW_08, rel=1e-14)


def test_integral_of_staircase():
    g = make_uniform_grid(0, math.pi, 4096, ScalingModel(1.0))
    assert abs(falpha_integral(g, g.staircase_nodes) - math.pi**2 / 2) < 1e-6


def test_integral_length_mismatch():
    g = make_uniform_grid(0, 1, 4, ScalingModel(1.0))
    with pytest.raises(ArgumentError):
        falpha_integral(g, np.ones(4))


@pytest.mark.parametrize("alpha", [1.0, 0.9, 0.8])
@pytest.mark.parametrize(
    "integrand, antiderivative",
    [(lambda s: s, lambda s: s**2 / 2 + 0 * s), (np.cos, np.sin)],
)
def test_integral_second_order(alpha, integrand, antiderivative):
    # integrand h'(S) integrated in dS should converge to h(S(b)) - h(S(a)) at order 2
    model = ScalingModel(alpha)
    errs = []
    for steps in (64, 128, 256, 512):
        g = make_uniform_grid(0, math.pi, steps, model)
        exact = antiderivative(g.staircase_nodes[-1]) - antiderivative(0.0)
        errs.append(abs(falpha_integral(g, integrand(g.staircase_nodes)) - exact))
    if errs[0] < 1e-13:  # trapezoid exact for linear integrands
        assert max(errs) < 1e-12
        return
    ratios = [e0 / e1 for e0, e1 in zip(errs[:-1], errs[1:])]
    assert all(3.0 < q < 5.5 for q in ratios), ratios


@given(alphas, st.integers(2, 200), st.data())
def test_integral_additive(alpha, steps, data):
    model = ScalingModel(alpha)
    g = make_uniform_grid(0, math.pi, steps, model)
    k = data.draw(st.integers(1, steps - 1))
    vals = np.cos(g.nodes) + g.staircase_nodes**2
    from fracdirac.fractal_core import Grid

    left = Grid(g.nodes[: k + 1], g.staircase_nodes[: k + 1], model)
    right = Grid(g.nodes[k:], g.staircase_nodes[k:], model)
    total = falpha_integral(left, vals[: k + 1]) + falpha_integral(right, vals[k:])
    assert total == pytest.approx(falpha_integral(g, vals), rel=1e-12, abs=1e-12)
