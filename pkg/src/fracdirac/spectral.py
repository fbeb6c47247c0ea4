"""Characteristic function, eigenvalues, eigenpairs and the spectral identities.

The characteristic function is ``Delta(lam) = phi2 psi1 - phi1 psi2``; it
does not depend on x, so it is evaluated cheaply as ``-phi1(b, lam)``
(one forward sweep) with ``psi1(a, lam)`` kept as an independent check.
Eigenvalues are its zeros: a uniform scan finds sign changes, batched
bisection shrinks every bracket, and one secant step polishes the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirac_system import DiracProblem, Trajectory, inner_product
from .errors import (
    ArgumentError,
    ConsistencyError,
    ConvergenceError,
    DegenerateSlopeError,
    DivergenceError,
    FracDiracError,
    StudyError,
)
from .fractal_core import falpha_integral
from .integrator import IntegratorConfig, propagate_phi, propagate_psi, shoot

DEFAULT_WINDOW = (0.0, math.pi)
DEFAULT_SCAN_POINTS = 311
DEFAULT_TOL = 1e-9
MAX_BISECTIONS = 200
SLOPE_STEP = 1e-5
SLOPE_FLOOR = 1e-12
BETA_FLOOR = 1e-12
BETA_AGREEMENT = 1e-4


@dataclass(frozen=True)
class CharacteristicSample:
    lam: float
    delta: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def characteristic_many(lams, problem: DiracProblem, config: IntegratorConfig | None = None) -> np.ndarray:
    """``-phi1(b, lam)`` for every ``lam``; non-finite where the sweep diverged."""
    return -shoot(lams, problem, config)[:, 0]


def characteristic_via_psi_many(lams, problem: DiracProblem, config: IntegratorConfig | None = None) -> np.ndarray:
    return shoot(lams, problem, config, backward=True)[:, 0]


def _finite_scalar(values, lam) -> float:
    value = float(values[0])
    if not math.isfinite(value):
        raise DivergenceError(f"characteristic function diverged at lam={lam}", lam=lam)
    return value


def characteristic(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None) -> float:
    return _finite_scalar(characteristic_many([lam], problem, config), lam)


def characteristic_via_psi(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None) -> float:
    return _finite_scalar(characteristic_via_psi_many([lam], problem, config), lam)


def wronskian_profile(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None) -> np.ndarray:
    """``phi2 psi1 - phi1 psi2`` at every grid node."""
    phi = propagate_phi(lam, problem, config)
    psi = propagate_psi(lam, problem, config)
    return phi.f2 * psi.f1 - phi.f1 * psi.f2


# -- scanning and root refinement --------------------------------------------


def scan_characteristic(lam_min: float, lam_max: float, points: int, problem: DiracProblem,
                        config: IntegratorConfig | None = None) -> list[CharacteristicSample]:
    """Samples of Delta on a uniform grid of ``points`` values from ``lam_min`` to ``lam_max``."""
    if not lam_min < lam_max:
        raise ArgumentError(f"need lam_min < lam_max, got ({lam_min}, {lam_max})")
    if int(points) != points or points < 2:
        raise ArgumentError(f"points must be an integer >= 2, got {points!r}")
    lams = np.linspace(lam_min, lam_max, int(points))
    deltas = characteristic_many(lams, problem, config)
    return [
        CharacteristicSample(float(l), float(d), None if math.isfinite(d) else "integration diverged")
        for l, d in zip(lams, deltas)
    ]


def find_brackets(samples: list[CharacteristicSample], include_left: bool = False):
    """Sign-change brackets of a scan, plus intervals that could not be judged.

    An exact zero at a sample gives a degenerate bracket ``(lam, lam)``; the
    first sample only counts when ``include_left`` (the window is open there).
    Returns ``(brackets, unresolved)``.
    """
    brackets, unresolved = [], []
    for i, s in enumerate(samples):
        if s.ok and s.delta == 0.0 and (i > 0 or include_left):
            brackets.append((s.lam, s.lam))
    for lo, hi in zip(samples[:-1], samples[1:]):
        if not (lo.ok and hi.ok):
            unresolved.append((lo.lam, hi.lam))
        elif lo.delta * hi.delta < 0.0:
            brackets.append((lo.lam, hi.lam))
    brackets.sort()
    return brackets, unresolved


@dataclass(frozen=True)
class RefinedRoot:
    lam: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def refine_brackets(brackets, tol: float, problem: DiracProblem, config: IntegratorConfig | None = None,
                    max_iter: int = MAX_BISECTIONS) -> list[RefinedRoot | FracDiracError]:
    """Bisect all brackets simultaneously, then take one secant step in each.

    Failures come back in place as exception instances instead of raising,
    so one bad bracket does not hide the others.
    """
    if tol <= 0:
        raise ArgumentError("tolerance must be positive")
    out: list = [None] * len(brackets)
    lo = np.array([b[0] for b in brackets], dtype=float)
    hi = np.array([b[1] for b in brackets], dtype=float)
    if lo.size == 0:
        return []
    d_lo = characteristic_many(lo, problem, config)
    d_hi = characteristic_many(hi, problem, config)
    active = np.ones(lo.size, dtype=bool)
    for k, (a, b) in enumerate(brackets):
        if a == b and d_lo[k] == 0.0:
            out[k] = RefinedRoot(float(a), 0.0, 0, (a, b))
            active[k] = False
        elif not (d_lo[k] * d_hi[k] < 0.0):
            out[k] = ArgumentError(f"no sign change on [{a}, {b}]")
            active[k] = False
    iterations = np.zeros(lo.size, dtype=int)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        # stop where the bracket is below tol or below float resolution
        active &= (hi - lo >= tol) & (mid > lo) & (mid < hi)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        d_mid = characteristic_many(mid[idx], problem, config)
        for k, dm in zip(idx, d_mid):
            iterations[k] += 1
            if not math.isfinite(dm):
                out[k] = DivergenceError(f"characteristic function diverged at lam={mid[k]}", lam=mid[k])
                active[k] = False
            elif dm == 0.0:
                lo[k] = hi[k] = mid[k]
                d_lo[k] = d_hi[k] = 0.0
                active[k] = False
            elif d_lo[k] * dm < 0.0:
                hi[k], d_hi[k] = mid[k], dm
            else:
                lo[k], d_lo[k] = mid[k], dm
    else:
        for k in np.flatnonzero(active & (hi - lo >= tol)):
            out[k] = ConvergenceError(f"bracket {brackets[k]} not resolved after {max_iter} bisections")

    pending = [k for k in range(lo.size) if out[k] is None]
    if not pending:
        return out
    guesses = []
    for k in pending:
        mid = 0.5 * (lo[k] + hi[k])
        denom = d_hi[k] - d_lo[k]
        guess = mid
        if lo[k] < hi[k] and denom != 0.0:
            secant = lo[k] - d_lo[k] * (hi[k] - lo[k]) / denom
            if lo[k] <= secant <= hi[k]:
                guess = secant
        guesses.append(guess)
    residuals = np.abs(characteristic_many(guesses, problem, config))
    for k, lam, res in zip(pending, guesses, residuals):
        if not math.isfinite(res):
            out[k] = DivergenceError(f"characteristic function diverged at lam={lam}", lam=lam)
        else:
            out[k] = RefinedRoot(float(lam), float(res), int(iterations[k]), tuple(brackets[k]))
    return out


def refine_eigenvalue(bracket, tol: float, problem: DiracProblem, config: IntegratorConfig | None = None) -> float:
    """Zero of Delta inside ``bracket`` to within ``tol``."""
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ArgumentError(f"invalid bracket ({lo}, {hi})")
    (result,) = refine_brackets([(lo, hi)], tol, problem, config)
    if isinstance(result, Exception):
        raise result
    return result.lam


# -- eigenpairs --------------------------------------------------------------


def weight_number(phi: Trajectory) -> float:
    """Squared F^alpha-norm of an eigenfunction."""
    return falpha_integral(phi.grid, phi.f1**2 + phi.f2**2)


def _beta_estimates(lam_n, problem, config, phi=None):
    phi = phi if phi is not None else propagate_phi(lam_n, problem, config)
    psi = propagate_psi(lam_n, problem, config)
    direct = float(psi.f2[0])
    lsq = float(np.sum(psi.states * phi.states) / np.sum(phi.states * phi.states))
    return direct, lsq


def beta_constant(lam_n: float, problem: DiracProblem, config: IntegratorConfig | None = None, phi=None) -> float:
    """Proportionality constant ``psi = beta phi`` at an eigenvalue.

    ``phi2(a) = 1`` makes ``psi2(a)`` the direct estimate; the least
    squares ratio over all nodes must agree with it.
    """
    direct, lsq = _beta_estimates(lam_n, problem, config, phi)
    if abs(direct) < BETA_FLOOR:
        raise ConsistencyError(f"beta vanishes at lam={lam_n}")
    if abs(direct - lsq) > BETA_AGREEMENT * abs(direct):
        raise ConsistencyError(
            f"psi is not proportional to phi at lam={lam_n} (beta {direct:.10g} vs {lsq:.10g}); "
            "eigenvalue not converged"
        )
    return direct


def delta_slope(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None,
                step: float = SLOPE_STEP) -> float:
    """Central difference of Delta in the spectral parameter."""
    d = characteristic_many([lam + step, lam - step], problem, config)
    if not np.all(np.isfinite(d)):
        raise DivergenceError(f"characteristic function diverged near lam={lam}", lam=lam)
    return float((d[0] - d[1]) / (2.0 * step))


def staircase_slope(lam: float, problem: DiracProblem, config: IntegratorConfig | None = None,
                    step: float = SLOPE_STEP) -> float:
    """Difference quotient of Delta against the staircase of the spectral parameter.

    Diagnostic only; coincides with :func:`delta_slope` to first order when alpha = 1.
    """
    if lam <= 0:
        raise ArgumentError("staircase difference quotient needs lam > 0")
    other = lam + step
    d = characteristic_many([lam, other], problem, config)
    alpha = problem.alpha
    return float((d[0] - d[1]) / (lam**alpha - other**alpha))


@dataclass(frozen=True, eq=False)
class Eigenpair:
    index: int
    lambda_n: float
    phi: Trajectory = field(repr=False)
    weight_alpha_n: float
    beta_n: float
    residual: float
    delta_slope: float


def make_eigenpair(index: int, root: RefinedRoot, problem: DiracProblem,
                   config: IntegratorConfig | None = None) -> Eigenpair:
    phi = propagate_phi(root.lam, problem, config)
    return Eigenpair(
        index=index,
        lambda_n=root.lam,
        phi=phi,
        weight_alpha_n=weight_number(phi),
        beta_n=beta_constant(root.lam, problem, config, phi=phi),
        residual=root.residual,
        delta_slope=delta_slope(root.lam, problem, config),
    )


@dataclass(frozen=True)
class BracketFailure:
    bracket: tuple[float, float]
    reason: str


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Result of :func:`solve_spectrum`; iterates over the eigenpairs."""

    pairs: tuple[Eigenpair, ...]
    failures: tuple[BracketFailure, ...]
    samples: tuple[CharacteristicSample, ...] = field(repr=False)
    window: tuple[float, float]

    @property
    def eigenvalues(self) -> list[float]:
        return [p.lambda_n for p in self.pairs]

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]


def solve_spectrum(window=DEFAULT_WINDOW, problem: DiracProblem | None = None,
                   config: IntegratorConfig | None = None, scan_points: int = DEFAULT_SCAN_POINTS,
                   tol: float = DEFAULT_TOL) -> Spectrum:
    """All eigenpairs with eigenvalue in the half-open window ``(lam_min, lam_max]``."""
    if problem is None:
        raise ArgumentError("a problem is required")
    lam_min, lam_max = float(window[0]), float(window[1])
    samples = scan_characteristic(lam_min, lam_max, scan_points, problem, config)
    brackets, unresolved = find_brackets(samples)
    failures = [BracketFailure(b, "scan sample diverged") for b in unresolved]
    roots = []
    for bracket, result in zip(brackets, refine_brackets(brackets, tol, problem, config)):
        if isinstance(result, Exception):
            failures.append(BracketFailure(bracket, str(result)))
        else:
            roots.append(result)
    roots.sort(key=lambda r: r.lam)
    pairs = []
    for root in roots:
        try:
            pairs.append(make_eigenpair(len(pairs) + 1, root, problem, config))
        except FracDiracError as exc:
            failures.append(BracketFailure(root.bracket, str(exc)))
    return Spectrum(tuple(pairs), tuple(failures), tuple(samples), (lam_min, lam_max))


# -- identities ----------------------------------------------------------------


def weight_slope_defect(pair: Eigenpair, problem: DiracProblem, config: IntegratorConfig | None = None) -> float:
    """Relative defect of ``beta_n * alpha_n`` against the slope of Delta at ``lambda_n``."""
    slope = delta_slope(pair.lambda_n, problem, config)
    if abs(slope) < SLOPE_FLOOR:
        raise DegenerateSlopeError(f"Delta has a vanishing slope at lam={pair.lambda_n}")
    return abs(pair.beta_n * pair.weight_alpha_n - slope) / abs(slope)


def orthogonality_matrix(pairs) -> np.ndarray:
    """Normalised Gram matrix of the eigenfunctions."""
    pairs = list(pairs)
    if not pairs:
        raise ArgumentError("need at least one eigenpair")
    n = len(pairs)
    gram = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            value = inner_product(pairs[i].phi, pairs[j].phi) / math.sqrt(
                pairs[i].weight_alpha_n * pairs[j].weight_alpha_n
            )
            gram[i, j] = gram[j, i] = value
    return gram


@dataclass(frozen=True)
class ConvergenceStudy:
    levels: tuple[int, ...]
    eigenvalues: tuple[float, ...]
    slopes: tuple[float, ...]
    orders: tuple[float, ...]
    exact: float | None = None

    @property
    def observed_order(self) -> float:
        return self.orders[-1]

    def rows(self):
        """(steps, eigenvalue, error-or-difference, order) per level."""
        out = []
        for k, (n, lam) in enumerate(zip(self.levels, self.eigenvalues)):
            if self.exact is not None:
                err = abs(lam - self.exact)
            else:
                err = abs(lam - self.eigenvalues[k - 1]) if k else float("nan")
            order = float("nan")
            if self.exact is not None and k:
                order = self.orders[k - 1]
            elif self.exact is None and k >= 2:
                order = self.orders[k - 2]
            out.append((n, lam, err, order))
        return out


def convergence_study(problem: DiracProblem, config: IntegratorConfig | None = None, window=DEFAULT_WINDOW,
                      levels=(128, 256, 512, 1024), index: int = 1, exact: float | None = None,
                      scan_points: int = DEFAULT_SCAN_POINTS, tol: float = 1e-13) -> ConvergenceStudy:
    """Observed convergence order of the ``index``-th eigenvalue under step doubling.

    With ``exact`` the order comes from errors against it; otherwise from
    ratios of successive differences (Richardson).
    """
    levels = tuple(int(n) for n in levels)
    if len(levels) < 3:
        raise StudyError("need at least three levels")
    if any(b != 2 * a for a, b in zip(levels[:-1], levels[1:])):
        raise StudyError("each level must double the previous one")
    config = config or IntegratorConfig()
    lams, slopes = [], []
    for n in levels:
        cfg = IntegratorConfig(config.method, n)
        samples = scan_characteristic(window[0], window[1], scan_points, problem, cfg)
        brackets, _ = find_brackets(samples)
        if len(brackets) < index:
            break
        (result,) = refine_brackets([brackets[index - 1]], tol, problem, cfg)
        if isinstance(result, Exception):
            break
        lams.append(result.lam)
        slopes.append(delta_slope(result.lam, problem, cfg))
    if len(lams) < 2 or (exact is None and len(lams) < 3):
        raise StudyError(f"only {len(lams)} levels converged")
    if exact is not None:
        errs = [abs(l - exact) for l in lams]
        orders = [math.log2(e0 / e1) if e1 > 0 else float("inf") for e0, e1 in zip(errs[:-1], errs[1:])]
    else:
        diffs = [abs(b - a) for a, b in zip(lams[:-1], lams[1:])]
        orders = [math.log2(d0 / d1) if d1 > 0 else float("inf") for d0, d1 in zip(diffs[:-1], diffs[1:])]
    return ConvergenceStudy(levels[: len(lams)], tuple(lams), tuple(slopes), tuple(orders), exact)
