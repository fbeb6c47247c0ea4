"""Numerical checks of the spectral identities over the built-in examples.

Each suite returns a list of :class:`Check` rows; a suite passes when every
row passes.  The thresholds below are the contract, not tuning knobs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac_system import LAGRANGE_PAIRS, DiracProblem, lagrange_defect
from .errors import FracDiracError
from .integrator import IntegratorConfig
from .presets import ALPHAS, EXAMPLES
from .spectral import (
    DEFAULT_WINDOW,
    characteristic_many,
    characteristic_via_psi_many,
    convergence_study,
    orthogonality_matrix,
    solve_spectrum,
    weight_slope_defect,
    wronskian_profile,
)

ORTHOGONALITY_TOL = 1e-4
WRONSKIAN_TOL = 1e-5
FORWARD_BACKWARD_TOL = 1e-6
SLOPE_DEFECT_TOL = 1e-3
LAGRANGE_RATIO = (3.0, 5.0)
ORDER_RANGE = (3.0, 5.0)

LAGRANGE_LEVELS = (512, 1024, 2048)
CONVERGENCE_LEVELS = (64, 128, 256, 512)
FREE_CONVERGENCE_LEVELS = (128, 256, 512, 1024)
PROBE_POINTS = 32


@dataclass(frozen=True)
class Check:
    suite: str
    label: str
    value: float
    threshold: str
    passed: bool

    def __post_init__(self):
        # numpy scalars leak in from comparisons; keep the row JSON-friendly
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "passed", bool(self.passed))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.suite:<14} {self.label:<44} {self.value:.3e}  ({self.threshold})"


def _failed(suite, label, exc):
    return Check(suite, f"{label}: {type(exc).__name__}: {exc}", float("nan"), "error", False)


def _presets(alphas=ALPHAS, steps=None):
    for number, example in EXAMPLES.items():
        for alpha in alphas:
            yield f"ex{number} a={alpha}", example.problem(alpha, steps)


def orthogonality_suite(steps=None, window=DEFAULT_WINDOW) -> list[Check]:
    out = []
    for label, problem in _presets(steps=steps):
        try:
            spectrum = solve_spectrum(window, problem)
            gram = orthogonality_matrix(spectrum)
        except FracDiracError as exc:
            out.append(_failed("orthogonality", label, exc))
            continue
        off = float(np.max(np.abs(gram - np.eye(len(gram))))) if len(gram) > 1 else 0.0
        out.append(Check("orthogonality", f"{label} n={len(gram)} max|G_ij|", off,
                         f"< {ORTHOGONALITY_TOL:g}", off < ORTHOGONALITY_TOL))
    return out


def lagrange_suite(levels=LAGRANGE_LEVELS) -> list[Check]:
    out = []
    for label, problem in _presets():
        for k, (f, g) in enumerate(LAGRANGE_PAIRS, start=1):
            try:
                defects = [lagrange_defect(f, g, problem, problem.grid(n)) for n in levels]
            except FracDiracError as exc:
                out.append(_failed("lagrange", f"{label} pair{k}", exc))
                continue
            ratios = [d0 / d1 for d0, d1 in zip(defects[:-1], defects[1:])]
            worst = max(ratios, key=lambda q: abs(q - 4.0))
            ok = all(LAGRANGE_RATIO[0] <= q <= LAGRANGE_RATIO[1] for q in ratios)
            out.append(Check("lagrange", f"{label} pair{k} defect ratio", worst, "4 +/- 1", ok))
    return out


def wronskian_suite(steps=None, window=DEFAULT_WINDOW, points=PROBE_POINTS) -> list[Check]:
    """x-independence of the Wronskian and agreement of the two Delta formulas."""
    out = []
    lams = np.linspace(window[0], window[1], points + 1)[1:]
    for label, problem in _presets(steps=steps):
        try:
            forward = characteristic_many(lams, problem)
            backward = characteristic_via_psi_many(lams, problem)
            fb = float(np.max(np.abs(forward - backward) / (1.0 + np.abs(forward))))
            variation = 0.0
            for lam, delta in zip(lams[:: max(1, points // 8)], forward[:: max(1, points // 8)]):
                prof = wronskian_profile(float(lam), problem)
                variation = max(variation, float(np.ptp(prof)) / (1.0 + abs(delta)))
        except FracDiracError as exc:
            out.append(_failed("wronskian", label, exc))
            continue
        out.append(Check("wronskian", f"{label} forward/backward Delta", fb,
                         f"< {FORWARD_BACKWARD_TOL:g}", fb < FORWARD_BACKWARD_TOL))
        out.append(Check("wronskian", f"{label} x-variation", variation,
                         f"< {WRONSKIAN_TOL:g}", variation < WRONSKIAN_TOL))
    return out


def weight_slope_suite(steps=None, window=DEFAULT_WINDOW, alphas=(1.0,)) -> list[Check]:
    """beta_n * alpha_n against the slope of Delta at every eigenvalue."""
    out = []
    for label, problem in _presets(alphas, steps):
        try:
            spectrum = solve_spectrum(window, problem)
            defects = [weight_slope_defect(pair, problem) for pair in spectrum]
        except FracDiracError as exc:
            out.append(_failed("relation28", label, exc))
            continue
        worst = max(defects) if defects else float("nan")
        out.append(Check("relation28", f"{label} n={len(defects)} max defect", worst,
                         f"< {SLOPE_DEFECT_TOL:g}", bool(defects) and worst < SLOPE_DEFECT_TOL))
    return out


def convergence_suite() -> list[Check]:
    out = []
    cases = [("free a=1.0", DiracProblem("0", "0"), FREE_CONVERGENCE_LEVELS, 1.0)]
    cases += [(f"ex{n} a=1.0", ex.problem(1.0), CONVERGENCE_LEVELS, None) for n, ex in EXAMPLES.items()]
    for label, problem, levels, exact in cases:
        try:
            study = convergence_study(problem, IntegratorConfig(), levels=levels, exact=exact)
        except FracDiracError as exc:
            out.append(_failed("convergence", label, exc))
            continue
        order = study.observed_order
        ok = ORDER_RANGE[0] <= order <= ORDER_RANGE[1] and all(abs(s) > 1e-12 for s in study.slopes)
        out.append(Check("convergence", f"{label} lambda_1 observed order", order, "4 +/- 1", ok))
    return out


SUITES = {
    "orthogonality": orthogonality_suite,
    "lagrange": lagrange_suite,
    "wronskian": wronskian_suite,
    "relation28": weight_slope_suite,
    "convergence": convergence_suite,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    return SUITES[name]()


def all_passed(checks) -> bool:
    return bool(checks) and all(c.passed for c in checks)
