"""The three worked examples and their published eigenvalue tables.

Each example is stated with coefficients written in the staircase value
(``printed_p``/``printed_r``).  The published numbers, however, are
reproduced only when the coefficients are evaluated at the physical
abscissa while the derivative stays fractal, so the table presets use the
``x`` form (``p``/``r``).  At alpha = 1 the two forms coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dirac_system import DiracProblem
from .fractal_core import ScalingModel

ALPHAS = (0.8, 0.9, 1.0)
ABS_TOL = 2e-3  # classical and alpha = 1 cells
REL_TOL = 1e-2  # alpha < 1 cells


@dataclass(frozen=True)
class Example:
    number: int
    p: str
    r: str
    printed_p: str
    printed_r: str
    classical: tuple[float, ...]
    fractal: dict  # alpha -> published eigenvalues below pi
    published_gaps: tuple[float, ...]  # |classical - fractal(alpha=1)| as printed

    def problem(self, alpha: float = 1.0, steps: int | None = None, printed: bool = False) -> DiracProblem:
        p, r = (self.printed_p, self.printed_r) if printed else (self.p, self.r)
        kwargs = {} if steps is None else {"steps": steps}
        return DiracProblem(p, r, ScalingModel(alpha), **kwargs)


def cell_tolerance(alpha: float | None, expected: float) -> float:
    """Absolute tolerance of one table cell (``alpha=None`` is the classical row)."""
    if alpha is None or alpha == 1.0:
        return ABS_TOL
    return REL_TOL * abs(expected)


EXAMPLES = {
    1: Example(
        1,
        p="1/(1+x)",
        r="1/(1+x^2)",
        printed_p="1/(1+S)",
        printed_r="1/(1+S^2)",
        classical=(0.347524, 1.176747, 2.055970, 3.020643),
        fractal={
            0.8: (0.413400, 1.438434, 2.566015),
            0.9: (0.378385, 1.301643, 2.296227),
            1.0: (0.347685, 1.176925, 2.056040, 3.020692),
        },
        published_gaps=(1.61e-4, 1.78e-4, 7.00e-5, 4.90e-5),
    ),
    2: Example(
        2,
        p="x+1",
        r="x^2+1",
        printed_p="S+1",
        printed_r="S^2+1",
        classical=(1.544759,),
        fractal={0.8: (1.516625,), 0.9: (1.530339,), 1.0: (1.544186,)},
        published_gaps=(5.73e-4,),
    ),
    3: Example(
        3,
        p="exp(x)",
        r="exp(-x)",
        printed_p="exp(S)",
        printed_r="exp(-S)",
        classical=(0.148677, 0.458639, 0.865004, 1.452401, 2.170184, 2.965759),
        fractal={
            0.8: (0.210897, 0.644622, 1.301299, 2.201887),
            0.9: (0.175896, 0.542309, 1.057334, 1.790641, 2.656072),
            1.0: (0.148792, 0.458986, 0.865601, 1.453235, 2.171232, 2.966991),
        },
        published_gaps=(1.15e-4, 3.47e-4, 5.97e-4, 8.34e-4, 1.05e-3, 1.23e-3),
    ),
}
