"""Staircase models, grids and F^alpha quadrature.

Everything fractal about the problem enters through the staircase map
``S(x)``.  Only the power law ``S(x) = x**alpha`` is implemented; the
``kind`` field of :class:`ScalingModel` is the place to hang other
staircase constructions (e.g. a coarse-grained mass function) later.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DomainError

POWER_LAW = "power_law"
_KINDS = (POWER_LAW,)


@dataclass(frozen=True)
class ScalingModel:
    """Staircase map of order ``alpha`` in (0, 1]."""

    alpha: float
    kind: str = POWER_LAW

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (0.0 < alpha <= 1.0):
            raise DomainError(f"scaling index must lie in (0, 1], got {self.alpha!r}")
        if self.kind not in _KINDS:
            raise ArgumentError(f"unknown staircase kind {self.kind!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def is_classical(self) -> bool:
        return self.alpha == 1.0

    def staircase(self, x):
        """Evaluate ``S(x)``; accepts scalars or arrays."""
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError("staircase is defined for x >= 0 only")
        # pow(x, 1.0) is exact, so alpha=1 reduces to the identity bit for bit
        out = np.power(arr, self.alpha)
        return float(out) if out.ndim == 0 else out

    def inverse(self, t):
        """Physical abscissa with ``S(x) = t``."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError("inverse staircase is defined for t >= 0 only")
        out = np.power(arr, 1.0 / self.alpha)
        return float(out) if out.ndim == 0 else out


def staircase_eval(x: float, model: ScalingModel) -> float:
    return model.staircase(x)


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes in x together with their staircase images."""

    nodes: np.ndarray
    staircase_nodes: np.ndarray
    model: ScalingModel = field(repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        snodes = np.asarray(self.staircase_nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ArgumentError("a grid needs at least two nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ArgumentError("grid nodes must be strictly increasing")
        if snodes.shape != nodes.shape:
            raise ArgumentError("staircase nodes do not match grid nodes")
        nodes.flags.writeable = False
        snodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "staircase_nodes", snodes)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def steps(self) -> int:
        return self.nodes.size - 1

    @property
    def gaps(self) -> np.ndarray:
        """Staircase increments ``S(x_{n+1}) - S(x_n)``."""
        return np.diff(self.staircase_nodes)

    def __len__(self):
        return self.nodes.size

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.nodes.shape == other.nodes.shape
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.staircase_nodes, other.staircase_nodes)
        )


def make_uniform_grid(a: float, b: float, steps: int, model: ScalingModel) -> Grid:
    """``steps + 1`` equally spaced nodes on [a, b] with cached ``S(x_i)``."""
    if not a < b:
        raise ArgumentError(f"need a < b, got a={a!r}, b={b!r}")
    if int(steps) != steps or steps < 1:
        raise ArgumentError(f"steps must be a positive integer, got {steps!r}")
    nodes = np.linspace(a, b, int(steps) + 1)
    nodes[0], nodes[-1] = a, b
    return Grid(nodes, model.staircase(nodes), model)


def falpha_integral(grid: Grid, values) -> float:
    """Trapezoid rule in the staircase coordinate, approximating the F^alpha-integral."""
    vals = np.asarray(values, dtype=float)
    if vals.shape != grid.nodes.shape:
        raise ArgumentError(
            f"expected {grid.nodes.size} samples, got {vals.size}"
        )
    return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * grid.gaps))
