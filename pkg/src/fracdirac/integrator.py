"""Fourth-order fractal Runge-Kutta integration of the Dirac system.

One step advances the state by the staircase increment
``h = S(x_{n+1}) - S(x_n)``; the two inner stages sit at the staircase
midpoint ``S(x_n) + h/2``, whose physical abscissa (needed when a
coefficient mentions ``x``) is recovered through the inverse power map.
With ``alpha = 1`` every formula collapses to textbook RK4, and the
classical method is realised exactly that way.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import _kernels
from .dirac_system import DiracProblem, State2, Trajectory, rhs
from .errors import ArgumentError, DivergenceError
from .fractal_core import Grid

PHI_START = (0.0, 1.0)
PSI_END = (0.0, 1.0)


class Method(str, enum.Enum):
    FRACTAL = "fractal"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class IntegratorConfig:
    """Method choice plus an optional override of the problem's step count."""

    method: Method = Method.FRACTAL
    steps: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.steps is not None and (int(self.steps) != self.steps or self.steps < 2):
            raise ArgumentError(f"steps must be an integer >= 2, got {self.steps!r}")

    def effective_problem(self, problem: DiracProblem) -> DiracProblem:
        """The problem actually integrated: classical drops to ``S(x) = x``."""
        if self.method is Method.CLASSICAL and problem.alpha != 1.0:
            problem = problem.with_alpha(1.0)
        if self.steps is not None and self.steps != problem.steps:
            problem = problem.with_steps(self.steps)
        return problem


DEFAULT_CONFIG = IntegratorConfig()


class Discretization(NamedTuple):
    grid: Grid
    h: np.ndarray  # staircase gaps
    p_node: np.ndarray
    p_mid: np.ndarray
    r_node: np.ndarray
    r_mid: np.ndarray

    def arrays(self):
        return self.h, self.p_node, self.p_mid, self.r_node, self.r_mid


def stage_midpoints(grid: Grid):
    """Staircase midpoints of each cell and their physical abscissae."""
    t_mid = grid.staircase_nodes[:-1] + 0.5 * grid.gaps
    return t_mid, grid.model.inverse(t_mid)


@lru_cache(maxsize=32)
def discretize(problem: DiracProblem) -> Discretization:
    """Sample ``p`` and ``r`` at the nodes and stage midpoints of the problem grid."""
    grid = problem.grid()
    t_mid, x_mid = stage_midpoints(grid)
    p_node, r_node = problem.coefficients(grid.staircase_nodes, grid.nodes)
    p_mid, r_mid = problem.coefficients(t_mid, x_mid)
    arrays = [np.ascontiguousarray(a, dtype=np.float64) for a in (grid.gaps, p_node, p_mid, r_node, r_mid)]
    for a in arrays:
        a.flags.writeable = False
    return Discretization(grid, *arrays)


def frk4_step(x_n: float, x_next: float, y_n, lam: float, problem: DiracProblem) -> State2:
    """One fractal RK4 step from ``x_n`` to ``x_next`` (either direction).

    Reference implementation that evaluates the coefficients directly;
    the sweeps in :mod:`fracdirac._kernels` do the same arithmetic on
    pre-sampled coefficients.
    """
    model = problem.model
    s_n, s_next = model.staircase(x_n), model.staircase(x_next)
    h = s_next - s_n
    x_mid = model.inverse(s_n + 0.5 * h)
    y = np.asarray(y_n, dtype=float)
    k1 = np.array(rhs(x_n, y, lam, problem))
    k2 = np.array(rhs(x_mid, y + 0.5 * h * k1, lam, problem))
    k3 = np.array(rhs(x_mid, y + 0.5 * h * k2, lam, problem))
    k4 = np.array(rhs(x_next, y + h * k3, lam, problem))
    out = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"non-finite state stepping {x_n} -> {x_next} at lam={lam}", lam=lam)
    return State2(float(out[0]), float(out[1]))


def _check_path(states: np.ndarray, lam: float, reverse: bool):
    bad = ~np.all(np.isfinite(states), axis=1)
    if bad.any():
        idx = np.flatnonzero(bad)
        node = int(idx[-1] if reverse else idx[0])
        raise DivergenceError(
            f"integration diverged at grid node {node} (lam={lam})", step=node, lam=lam
        )


def _propagate(lam, problem, config, reverse, start):
    problem = (config or DEFAULT_CONFIG).effective_problem(problem)
    disc = discretize(problem)
    states = _kernels.sweep_path(float(lam), *disc.arrays(), np.asarray(start, dtype=float), reverse)
    _check_path(states, lam, reverse)
    return Trajectory(disc.grid, states, float(lam))


def propagate_phi(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None) -> Trajectory:
    """Forward solution with ``f1(a) = 0, f2(a) = 1``."""
    return _propagate(lam, problem, config, False, PHI_START)


def propagate_psi(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None) -> Trajectory:
    """Backward solution with ``f1(b) = 0, f2(b) = 1``, stored in ascending x."""
    return _propagate(lam, problem, config, True, PSI_END)


def propagate_from(state, problem: DiracProblem, lam: float, config: IntegratorConfig | None = None,
                   backward: bool = False) -> Trajectory:
    """Sweep from an arbitrary state at ``a`` (or at ``b`` when ``backward``)."""
    return _propagate(lam, problem, config, backward, tuple(state))


def shoot(lams, problem: DiracProblem, config: IntegratorConfig | None = None, backward: bool = False) -> np.ndarray:
    """End states for many spectral parameters at once; shape (M, 2).

    Forward sweeps start from the left initial state and return the state
    at ``b``; backward sweeps return the state at ``a``.  Diverged sweeps
    come back as non-finite rows rather than raising.
    """
    problem = (config or DEFAULT_CONFIG).effective_problem(problem)
    disc = discretize(problem)
    start = np.asarray(PSI_END if backward else PHI_START, dtype=float)
    with np.errstate(all="ignore"):
        return _kernels.sweep_endpoint(np.atleast_1d(lams), *disc.arrays(), start, backward)
