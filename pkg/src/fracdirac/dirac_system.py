"""The fractal Dirac system on [a, b].

    D f2 - p(x) f1 = lam f1
   -D f1 + r(x) f2 = lam f2,      f1(a) = f1(b) = 0

with ``D`` the F^alpha-derivative.  Under the power-law staircase ``D``
acts as ``d/dS`` on functions of ``S = S(x)``, which is the coordinate
every routine here integrates and differentiates in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import coeff_lang as cl
from .errors import ArgumentError, CapabilityError, EvaluationError
from .fractal_core import Grid, ScalingModel, falpha_integral, make_uniform_grid

DEFAULT_STEPS = 4096


class State2(NamedTuple):
    f1: float
    f2: float


@dataclass(frozen=True)
class DiracProblem:
    """Immutable problem statement.  ``p`` and ``r`` may be given as text."""

    p: cl.Expr
    r: cl.Expr
    model: ScalingModel = field(default_factory=lambda: ScalingModel(1.0))
    a: float = 0.0
    b: float = math.pi
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        object.__setattr__(self, "p", cl.as_expr(self.p))
        object.__setattr__(self, "r", cl.as_expr(self.r))
        if not isinstance(self.model, ScalingModel):
            object.__setattr__(self, "model", ScalingModel(float(self.model)))
        if not float(self.a) < float(self.b):
            raise ArgumentError(f"need a < b, got [{self.a}, {self.b}]")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ArgumentError(f"steps must be an integer >= 2, got {self.steps!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def alpha(self) -> float:
        return self.model.alpha

    def with_alpha(self, alpha: float) -> "DiracProblem":
        return replace(self, model=ScalingModel(alpha, self.model.kind))

    def with_steps(self, steps: int) -> "DiracProblem":
        return replace(self, steps=steps)

    def grid(self, steps: int | None = None) -> Grid:
        return make_uniform_grid(self.a, self.b, steps or self.steps, self.model)

    def coefficients(self, s, x):
        """``(p, r)`` at staircase value ``s`` and abscissa ``x`` (scalars or arrays)."""
        try:
            return cl.eval_coefficient(self.p, s, x), cl.eval_coefficient(self.r, s, x)
        except EvaluationError as exc:
            where = f"x={x:.17g}" if np.ndim(x) == 0 else f"x in [{np.min(x):.6g}, {np.max(x):.6g}]"
            raise EvaluationError(f"{exc} ({where})", exc.node) from exc


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``(f1, f2)`` at every node of ``grid`` for spectral parameter ``lam``."""

    grid: Grid
    states: np.ndarray
    lam: float

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.shape != (len(self.grid), 2):
            raise ArgumentError(
                f"states shape {states.shape} does not match grid of {len(self.grid)} nodes"
            )
        states.flags.writeable = False
        object.__setattr__(self, "states", states)

    @property
    def f1(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def f2(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.states)))


def rhs(x: float, state, lam: float, problem: DiracProblem) -> State2:
    """Derivatives ``(df1/dS, df2/dS)`` of the system solved for ``D f``."""
    s = problem.model.staircase(x)
    p, r = problem.coefficients(s, x)
    f1, f2 = state
    return State2((r - lam) * f2, (lam + p) * f1)


# -- analytic S-derivatives for the operator identity checks -----------------

_ZERO = cl.Number(0.0)
_ONE = cl.Number(1.0)


def _is_const(node: cl.Expr) -> bool:
    if isinstance(node, (cl.Number, cl.Pi, cl.E)):
        return True
    if isinstance(node, cl.Neg):
        return _is_const(node.operand)
    if isinstance(node, cl.BinOp):
        return _is_const(node.left) and _is_const(node.right)
    if isinstance(node, cl.Call):
        return _is_const(node.arg)
    return False


def diff_s(node: cl.Expr) -> cl.Expr:
    """d/dS of an expression built from polynomials, sin, cos and exp of S."""
    if _is_const(node):
        return _ZERO
    if isinstance(node, cl.VarS):
        return _ONE
    if isinstance(node, cl.VarX):
        raise CapabilityError("cannot differentiate the physical abscissa x in S")
    if isinstance(node, cl.Neg):
        return cl.Neg(diff_s(node.operand))
    if isinstance(node, cl.BinOp):
        u, v = node.left, node.right
        if node.op in "+-":
            return cl.BinOp(node.op, diff_s(u), diff_s(v))
        if node.op == "*":
            return cl.BinOp(
                "+", cl.BinOp("*", diff_s(u), v), cl.BinOp("*", u, diff_s(v))
            )
        if node.op == "/" and _is_const(v):
            return cl.BinOp("/", diff_s(u), v)
        if node.op == "^" and _is_const(v):
            # u^c -> c * u^(c - 1) * u'
            return cl.BinOp(
                "*",
                cl.BinOp("*", v, cl.BinOp("^", u, cl.BinOp("-", v, _ONE))),
                diff_s(u),
            )
        raise CapabilityError(f"no S-derivative rule for {cl.render(node)!r}")
    if isinstance(node, cl.Call):
        inner = diff_s(node.arg)
        if node.name == "sin":
            outer = cl.Call("cos", node.arg)
        elif node.name == "cos":
            outer = cl.Neg(cl.Call("sin", node.arg))
        elif node.name == "exp":
            outer = node
        else:
            raise CapabilityError(f"no S-derivative rule for {node.name}()")
        return cl.BinOp("*", outer, inner)
    raise CapabilityError(f"no S-derivative rule for {node!r}")


def _sample(expr: cl.Expr, grid: Grid) -> np.ndarray:
    return cl.eval_coefficient(expr, grid.staircase_nodes, grid.nodes)


def apply_operator(f1_of_s, f2_of_s, problem: DiracProblem, grid: Grid):
    """Sample ``(D f2 - p f1, -D f1 + r f2)`` on ``grid`` for analytic ``f``."""
    f1, f2 = cl.as_expr(f1_of_s), cl.as_expr(f2_of_s)
    d1, d2 = diff_s(f1), diff_s(f2)
    p, r = problem.coefficients(grid.staircase_nodes, grid.nodes)
    v1, v2 = _sample(f1, grid), _sample(f2, grid)
    return _sample(d2, grid) - p * v1, -_sample(d1, grid) + r * v2


def inner_product(u: Trajectory, v: Trajectory) -> float:
    """F^alpha inner product of two trajectories on a shared grid."""
    if not u.grid.same_as(v.grid):
        raise ArgumentError("trajectories live on different grids")
    return falpha_integral(u.grid, u.f1 * v.f1 + u.f2 * v.f2)


def lagrange_defect(f, g, problem: DiracProblem, grid: Grid | None = None) -> float:
    """``|<Lf, g> - <f, Lg> - [f2 g1 - f1 g2]_a^b|`` for analytic pairs ``f``, ``g``.

    The boundary bracket carries the indicator of the fractal support,
    which is identically one under the power-law staircase.
    """
    grid = grid if grid is not None else problem.grid()
    f1, f2 = (cl.as_expr(e) for e in f)
    g1, g2 = (cl.as_expr(e) for e in g)
    lf1, lf2 = apply_operator(f1, f2, problem, grid)
    lg1, lg2 = apply_operator(g1, g2, problem, grid)
    fv1, fv2, gv1, gv2 = (_sample(e, grid) for e in (f1, f2, g1, g2))
    lhs = falpha_integral(grid, lf1 * gv1 + lf2 * gv2) - falpha_integral(
        grid, fv1 * lg1 + fv2 * lg2
    )
    bracket = fv2 * gv1 - fv1 * gv2
    return abs(lhs - (bracket[-1] - bracket[0]))


# analytic pairs whose identity defect is dominated by quadrature error
LAGRANGE_PAIRS = (
    (("sin(S)", "cos(S)"), ("cos(2*S)", "S^2")),
    (("S^3", "exp(S)"), ("sin(S)", "1 + S")),
    (("exp(-S)", "S"), ("S^2", "cos(S)")),
)
