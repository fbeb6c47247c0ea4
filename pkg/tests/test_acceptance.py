"""Acceptance gate: one PASS/FAIL line per criterion.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""

import math
import os
import sys
import time
import zlib

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fracdirac import coeff_lang as cl
from fracdirac.dirac_system import DiracProblem
from fracdirac.errors import ExpressionSyntaxError
from fracdirac.integrator import IntegratorConfig, Method
from fracdirac.presets import EXAMPLES, cell_tolerance
from fracdirac.spectral import solve_spectrum, weight_slope_defect
from fracdirac.verification import run_suite

from test_coeff_lang import CORPUS, MALFORMED, oracle

WINDOW = (0.0, math.pi)
CRITERIA = {}
RESULTS = {}


def criterion(name):
    def register(fn):
        CRITERIA[name] = fn
        return fn
    return register


def _solve(number, alpha, method=Method.FRACTAL):
    return solve_spectrum(WINDOW, EXAMPLES[number].problem(alpha), IntegratorConfig(method)).eigenvalues


def _row_error(found, expected, alpha):
    """(all cells within tolerance, worst |error| / tolerance)."""
    if len(found) < len(expected):
        return False, float("inf")
    ratios = [abs(f - e) / cell_tolerance(alpha, e) for f, e in zip(found, expected)]
    return max(ratios) <= 1.0, max(ratios)


@criterion("example1-classical")
def example1_classical():
    start = time.perf_counter()
    found = _solve(1, 1.0, Method.CLASSICAL)
    elapsed = time.perf_counter() - start
    ok, worst = _row_error(found, EXAMPLES[1].classical, None)
    ok = ok and len(found) == 4 and elapsed < 5.0
    return ok, f"{len(found)} eigenvalues, worst err/tol {worst:.3f}, runtime {elapsed:.2f}s (< 5 s)"


@criterion("example1-fractal-1.0")
def example1_fractal_one():
    fractal = _solve(1, 1.0)
    classical = _solve(1, 1.0, Method.CLASSICAL)
    ok, worst = _row_error(fractal, EXAMPLES[1].fractal[1.0], 1.0)
    gap = max(abs(a - b) for a, b in zip(fractal, classical))
    ok = ok and len(fractal) == len(classical) == 4 and gap <= 1e-9
    return ok, f"worst err/tol {worst:.3f}, |fractal - classical| {gap:.1e} (<= 1e-9)"


@criterion("example1-fractal-0.8-0.9")
def example1_fractal_below_one():
    f8, f9 = _solve(1, 0.8), _solve(1, 0.9)
    ok8, w8 = _row_error(f8, EXAMPLES[1].fractal[0.8], 0.8)
    ok9, w9 = _row_error(f9, EXAMPLES[1].fractal[0.9], 0.9)
    ok = ok8 and ok9 and len(f8) == 3
    return ok, f"alpha=0.8 count {len(f8)} (== 3) err/tol {w8:.3f}; alpha=0.9 err/tol {w9:.3f}"


@criterion("example2-all-rows")
def example2_rows():
    ex = EXAMPLES[2]
    parts, ok = [], True
    rows = [(None, ex.classical, _solve(2, 1.0, Method.CLASSICAL))]
    rows += [(a, ex.fractal[a], _solve(2, a)) for a in (0.8, 0.9, 1.0)]
    for alpha, expected, found in rows:
        good, worst = _row_error(found, expected, alpha)
        ok &= good
        parts.append(f"{'classical' if alpha is None else alpha}: {worst:.3f}")
    return ok, "err/tol " + ", ".join(parts)


@criterion("example3-all-rows")
def example3_rows():
    ex = EXAMPLES[3]
    classical = _solve(3, 1.0, Method.CLASSICAL)
    found = {a: _solve(3, a) for a in (0.8, 0.9, 1.0)}
    ok, worst = _row_error(classical, ex.classical, None)
    ok &= len(classical) == 6 and len(found[0.9]) == 5 and len(found[0.8]) == 4 and len(found[1.0]) == 6
    for a in (0.8, 0.9, 1.0):
        good, w = _row_error(found[a], ex.fractal[a], a)
        ok &= good
        worst = max(worst, w)
    counts = "/".join(str(len(found[a])) for a in (0.8, 0.9, 1.0))
    return ok, f"classical {len(classical)}, fractal 0.8/0.9/1.0 counts {counts} (4/5/6), worst err/tol {worst:.3f}"


@criterion("free-system-oracle")
def free_system():
    problem = DiracProblem("0", "0", steps=8192)
    spectrum = solve_spectrum(WINDOW, problem)
    if len(spectrum) != 3:
        return False, f"found {len(spectrum)} eigenvalues, expected 3"
    n = np.arange(1, 4)
    lam = np.max(np.abs(np.array(spectrum.eigenvalues) - n))
    weight = max(abs(p.weight_alpha_n - math.pi) for p in spectrum)
    beta = max(abs(p.beta_n - (-1) ** p.index) for p in spectrum)
    defect = max(weight_slope_defect(p, problem) for p in spectrum)
    ok = lam < 1e-6 and weight < 1e-5 and beta < 1e-5 and defect < 1e-4
    return ok, (f"|lambda - n| {lam:.1e} (< 1e-6), |weight - pi| {weight:.1e} (< 1e-5), "
                f"|beta - (-1)^n| {beta:.1e} (< 1e-5), slope defect {defect:.1e} (< 1e-4)")


@criterion("invariant-suite")
def invariant_suite():
    start = time.perf_counter()
    checks = run_suite("all")
    elapsed = time.perf_counter() - start
    failed = [c.label for c in checks if not c.passed]
    suites = sorted({c.suite for c in checks})
    ok = not failed and len(suites) == 5 and elapsed < 60.0
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks over {', '.join(suites)}, runtime {elapsed:.1f}s (< 60 s)"
    if failed:
        detail += f"; failing: {failed[:3]}"
    return ok, detail


@criterion("parser-suite")
def parser_suite():
    worst = 0.0
    for source in CORPUS:
        tree = cl.parse_coefficient(source)
        rng = np.random.default_rng(zlib.crc32(source.encode()))
        for s, x in rng.uniform(0.05, 3.0, size=(100, 2)):
            want = oracle(source, float(s), float(x))
            got = cl.eval_coefficient(tree, s, x)
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300))
    positioned = 0
    for source, offset in MALFORMED:
        try:
            cl.parse_coefficient(source)
        except ExpressionSyntaxError as exc:
            positioned += exc.offset == offset and f"offset {offset}" in str(exc)
    ok = len(CORPUS) >= 20 and worst <= 1e-12 and positioned == len(MALFORMED)
    return ok, (f"{len(CORPUS)} expressions x 100 points, worst rel err {worst:.1e} (<= 1e-12); "
                f"{positioned}/{len(MALFORMED)} malformed inputs with correct offsets")


def evaluate(name):
    ok, detail = CRITERIA[name]()
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS[name] = line
    return ok, line


@pytest.mark.parametrize("name", list(CRITERIA))
def test_acceptance(name):
    ok, line = evaluate(name)
    print(line)
    assert ok, line


if __name__ == "__main__":
    outcome = [evaluate(name) for name in CRITERIA]
    for _, line in outcome:
        print(line)
    sys.exit(0 if all(ok for ok, _ in outcome) else 1)
