import math

import numpy as np
import pytest

from fracdirac import _kernels
from fracdirac.dirac_system import DiracProblem
from fracdirac.errors import ArgumentError, DivergenceError
from fracdirac.integrator import (
    IntegratorConfig,
    Method,
    discretize,
    frk4_step,
    propagate_from,
    propagate_phi,
    propagate_psi,
    shoot,
)


def textbook_rk4(f, x, y, dx):
    k1 = f(x, y)
    k2 = f(x + dx / 2, y + dx / 2 * k1)
    k3 = f(x + dx / 2, y + dx / 2 * k2)
    k4 = f(x + dx, y + dx * k3)
    return y + dx * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def test_step_zero_rhs(free_problem):
    assert frk4_step(0.2, 0.3, (0.25, -1.5), 0.0, free_problem) == (0.25, -1.5)


def test_step_rotation(free_problem):
    got = frk4_step(0.0, 0.1, (0.0, 1.0), 1.0, free_problem)
    # one RK4 step of a rotation is the degree-4 Taylor polynomial of exp(hA)
    assert got.f1 == pytest.approx(-(0.1 - 0.1**3 / 6), rel=1e-15)
    assert got.f2 == pytest.approx(1 - 0.1**2 / 2 + 0.1**4 / 24, rel=1e-15)
    # so the f1 error against (-sin h, cos h) is h^5/120 - O(h^7), about 8.33e-8
    assert abs(got.f1 + 0.0998334166468281523) < 0.1**5 / 120
    assert abs(got.f2 - 0.995004165278025766) < 0.1**6 / 720


def test_step_matches_textbook_rk4_at_alpha_one():
    pr = DiracProblem("exp(S)", "1/(1+S^2)")
    lam = 0.7

    def f(x, y):
        p, r = math.exp(x), 1 / (1 + x * x)
        return np.array([(r - lam) * y[1], (lam + p) * y[0]])

    want = textbook_rk4(f, 0.5, np.array([0.3, 0.9]), 0.25)
    got = frk4_step(0.5, 0.75, (0.3, 0.9), lam, pr)
    np.testing.assert_allclose(got, want, rtol=1e-15, atol=1e-16)


@pytest.mark.parametrize("alpha", [1.0, 0.85])
def test_kernel_matches_reference_step(alpha):
    pr = DiracProblem("1/(1+x)", "exp(-S)", alpha, steps=40)
    lam = 1.3
    traj = propagate_phi(lam, pr)
    y = (0.0, 1.0)
    nodes = traj.grid.nodes
    for n in range(40):
        y = frk4_step(nodes[n], nodes[n + 1], y, lam, pr)
        np.testing.assert_allclose(y, traj.states[n + 1], rtol=1e-13, atol=1e-14)
    back = propagate_psi(lam, pr)
    y = (0.0, 1.0)
    for n in range(40, 0, -1):
        y = frk4_step(nodes[n], nodes[n - 1], y, lam, pr)
        np.testing.assert_allclose(y, back.states[n - 1], rtol=1e-13, atol=1e-14)


def test_phi_free_closed_form(free_problem):
    traj = propagate_phi(1.0, free_problem)
    np.testing.assert_allclose(traj.f1, -np.sin(traj.x), atol=1e-12)
    np.testing.assert_allclose(traj.f2, np.cos(traj.x), atol=1e-12)
    assert abs(traj.f1[-1]) < 1e-8
    still = propagate_phi(0.0, free_problem)
    assert np.all(still.states == [0.0, 1.0])


def test_psi_free_closed_form(free_problem):
    traj = propagate_psi(1.0, free_problem)
    np.testing.assert_allclose(traj.f1, -np.sin(traj.x - math.pi), atol=1e-12)
    np.testing.assert_allclose(traj.f2, np.cos(traj.x - math.pi), atol=1e-12)
    assert np.all(propagate_psi(0.0, free_problem).states == [0.0, 1.0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_psi_is_multiple_of_phi_at_integers(free_problem, n):
    phi = propagate_phi(float(n), free_problem)
    psi = propagate_psi(float(n), free_problem)
    np.testing.assert_allclose(psi.states, (-1) ** n * phi.states, atol=1e-6)


def test_phi_example1_near_table_value(ex1):
    traj = propagate_phi(0.347524, ex1)
    assert abs(traj.f1[-1]) < 5e-3 * traj.sup_norm()


@pytest.mark.parametrize("alpha", [0.8, 0.9, 1.0])
def test_phi_free_fractal_closed_form(alpha):
    # with p = r = 0 the solution is exact in S: (-sin(lam S), cos(lam S))
    pr = DiracProblem("0", "0", alpha)
    traj = propagate_phi(1.7, pr)
    s = traj.grid.staircase_nodes
    np.testing.assert_allclose(traj.f1, -np.sin(1.7 * s), atol=1e-11)


def test_classical_is_fractal_at_alpha_one(ex1):
    a = propagate_phi(0.9, ex1, IntegratorConfig(Method.FRACTAL))
    b = propagate_phi(0.9, ex1.with_alpha(0.8), IntegratorConfig(Method.CLASSICAL))
    np.testing.assert_array_equal(a.states, b.states)


def test_fourth_order_convergence(free_problem):
    errs = []
    for steps in (64, 128, 256, 512):
        traj = propagate_phi(2.0, free_problem, IntegratorConfig(steps=steps))
        exact = np.column_stack([-np.sin(2 * traj.x), np.cos(2 * traj.x)])
        errs.append(np.max(np.abs(traj.states - exact)))
    for e0, e1 in zip(errs, errs[1:]):
        assert 16 * 0.7 < e0 / e1 < 16 * 1.3


def test_backward_returns_to_start(free_problem):
    fwd = propagate_phi(1.37, free_problem)
    back = propagate_from(fwd.states[-1], free_problem, 1.37, backward=True)
    np.testing.assert_allclose(back.states[0], [0.0, 1.0], atol=1e-8)


def test_deterministic(ex1):
    a = propagate_phi(1.1, ex1.with_alpha(0.9))
    b = propagate_phi(1.1, ex1.with_alpha(0.9))
    assert a.states.tobytes() == b.states.tobytes()


def test_shoot_matches_paths(ex1):
    lams = np.array([0.2, 0.9, 2.4])
    pr = ex1.with_alpha(0.9)
    ends = shoot(lams, pr)
    starts = shoot(lams, pr, backward=True)
    for k, lam in enumerate(lams):
        np.testing.assert_allclose(ends[k], propagate_phi(lam, pr).states[-1], rtol=1e-14)
        np.testing.assert_allclose(starts[k], propagate_psi(lam, pr).states[0], rtol=1e-14)


def test_divergence_reports_node():
    pr = DiracProblem("exp(exp(S))", "exp(exp(S))", steps=64, b=6.5)
    with pytest.raises(DivergenceError) as info:
        propagate_phi(1.0, pr)
    assert info.value.step is not None and 0 < info.value.step <= 64
    assert not np.all(np.isfinite(shoot([1.0], pr)))


def test_config_validation():
    with pytest.raises(ArgumentError):
        IntegratorConfig(steps=1)
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("reverse", [False, True])
def test_numba_and_numpy_backends_agree(ex1, reverse):
    disc = discretize(ex1.with_alpha(0.8).with_steps(512))
    lams = np.linspace(0.1, 3.0, 7)
    y0 = np.array([0.0, 1.0])
    a = _kernels.sweep_endpoint_numba(lams, *disc.arrays(), y0, reverse)
    b = _kernels.sweep_endpoint_numpy(lams, *disc.arrays(), y0, reverse)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-14)
    pa = _kernels.sweep_path_numba(lams[3], *disc.arrays(), y0, reverse)
    pb = _kernels.sweep_path_numpy(lams[3], *disc.arrays(), y0, reverse)
    np.testing.assert_allclose(pa, pb, rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(pa[0 if reverse else -1], a[3], rtol=1e-13)


@pytest.mark.parametrize("reverse", [False, True])
def test_numpy_batch_sizes_agree_bitwise(ex1, reverse):
    # small batches take a scalar loop, large ones the vectorised sweep
    arrays = discretize(ex1.with_alpha(0.9).with_steps(256)).arrays()
    lams = np.linspace(0.05, 3.0, _kernels.SCALAR_BATCH + 5)
    y0 = np.array([0.0, 1.0])
    big = _kernels.sweep_endpoint_numpy(lams, *arrays, y0, reverse)
    small = np.vstack([_kernels.sweep_endpoint_numpy(lams[k:k + 3], *arrays, y0, reverse)
                       for k in range(0, len(lams), 3)])
    assert big.tobytes() == small.tobytes()
