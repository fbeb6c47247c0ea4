"""Command-line front end.

    fracdirac solve --p "1/(1+x)" --r "1/(1+x^2)" --alpha 0.8,0.9,1.0
    fracdirac table --example 3
    fracdirac eigenfunction --example 1 --index 1 --alpha 0.8,0.9,1 --out ef.csv
    fracdirac scan --p 0 --r 0 --format csv
    fracdirac verify --suite all

Exit codes: 0 success, 1 verification/table failure, 2 usage or parse
error, 3 numerical failure, 4 requested eigenpair not found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields

from . import __version__
from .coeff_lang import parse_coefficient, render
from .dirac_system import DEFAULT_STEPS, DiracProblem
from .errors import ExpressionSyntaxError, FracDiracError
from .fractal_core import ScalingModel
from .integrator import IntegratorConfig, Method
from .presets import ALPHAS, EXAMPLES, cell_tolerance
from .spectral import (
    DEFAULT_SCAN_POINTS,
    DEFAULT_TOL,
    find_brackets,
    scan_characteristic,
    solve_spectrum,
)
from .verification import SUITES, all_passed, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC, EXIT_NOT_FOUND = 0, 1, 2, 3, 4
COMMANDS = ("solve", "scan", "table", "eigenfunction", "verify")
FORMATS = ("human", "csv", "json")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = "solve"
    alpha: list = field(default_factory=lambda: [1.0])
    p: str | None = None
    r: str | None = None
    window: list = field(default_factory=lambda: [0.0, math.pi])
    steps: int = DEFAULT_STEPS
    scan_points: int = DEFAULT_SCAN_POINTS
    tol: float = DEFAULT_TOL
    method: str = "fractal"
    output_format: str = "human"
    output_path: str | None = None
    example: int | None = None
    index: int = 1
    suite: str = "all"
    printed: bool = False
    verbose: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.alpha:
            raise UsageError("at least one alpha is required")
        for a in self.alpha:
            if not 0.0 < a <= 1.0:
                raise UsageError(f"alpha must lie in (0, 1], got {a}")
        if len(self.window) != 2 or not self.window[0] < self.window[1]:
            raise UsageError(f"window must be MIN,MAX with MIN < MAX, got {self.window}")
        if self.tol <= 0:
            raise UsageError("tol must be positive")
        if self.steps < 2 or self.scan_points < 2:
            raise UsageError("steps and scan-points must be >= 2")
        if self.method not in ("fractal", "classical"):
            raise UsageError(f"unknown method {self.method!r}")
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.example is not None and self.example not in EXAMPLES:
            raise UsageError(f"example must be one of {sorted(EXAMPLES)}")
        if self.suite not in (*SUITES, "all"):
            raise UsageError(f"unknown suite {self.suite!r}")
        if self.index < 1:
            raise UsageError("index is 1-based")

    def coefficients(self):
        p, r = self.p, self.r
        if self.example is not None:
            ex = EXAMPLES[self.example]
            p = p if p is not None else (ex.printed_p if self.printed else ex.p)
            r = r if r is not None else (ex.printed_r if self.printed else ex.r)
        if p is None or r is None:
            raise UsageError("coefficients missing: give --p and --r, or --example")
        return p, r

    def problem(self, alpha: float) -> DiracProblem:
        p, r = self.coefficients()
        return DiracProblem(
            parse_coefficient(p), parse_coefficient(r), ScalingModel(alpha),
            a=0.0, b=math.pi, steps=self.steps,
        )

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(Method(self.method))


# -- argument handling -------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [_number(t) for t in text.split(",") if t.strip()]
    except (ValueError, ExpressionSyntaxError) as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {exc}") from exc


def _number(text: str) -> float:
    """A plain number or a constant expression such as ``pi``."""
    try:
        return float(text)
    except ValueError:
        return parse_coefficient(text).evaluate(0.0, 0.0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("problem and numerics")
    g.add_argument("--p", help="coefficient p as an expression in S (and x)")
    g.add_argument("--r", help="coefficient r as an expression in S (and x)")
    g.add_argument("--alpha", type=_float_list, help="comma-separated scaling indices in (0, 1]")
    g.add_argument("--window", type=_float_list, help="eigenvalue window MIN,MAX (default 0,pi)")
    g.add_argument("--steps", type=int, help=f"grid steps (default {DEFAULT_STEPS})")
    g.add_argument("--scan-points", dest="scan_points", type=int,
                   help=f"scan samples of Delta (default {DEFAULT_SCAN_POINTS})")
    g.add_argument("--tol", type=float, help=f"bisection tolerance (default {DEFAULT_TOL:g})")
    g.add_argument("--method", choices=("fractal", "classical"))
    g.add_argument("--example", type=int, choices=sorted(EXAMPLES), help="built-in example preset")
    g.add_argument("--printed", action="store_true", default=None,
                   help="use the example's coefficients in the staircase form S instead of x")
    o = common.add_argument_group("output")
    o.add_argument("--format", dest="output_format", choices=FORMATS)
    o.add_argument("--out", dest="output_path", help="write output to PATH instead of stdout")
    o.add_argument("--index", type=int, help="1-based eigenpair index (eigenfunction)")
    o.add_argument("--suite", choices=(*SUITES, "all"), help="verification suite")
    o.add_argument("--verbose", "-v", action="store_true", default=None)
    o.add_argument("--config", help="JSON run configuration; flags override its values")
    o.add_argument("--dump-config", dest="dump_config", help="write the resolved configuration to PATH")

    parser = argparse.ArgumentParser(prog="fracdirac", description="Fractal Dirac eigenvalue solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "eigenvalues in a window for each alpha",
        "scan": "samples of the characteristic function",
        "table": "reproduce a published eigenvalue table",
        "eigenfunction": "plot data x, S(x), f1, f2 of one eigenfunction",
        "verify": "numerical checks of the spectral identities",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            data[f.name] = value
    data["command"] = args.command
    cfg = RunConfig(**data)
    if not isinstance(cfg.alpha, (list, tuple)):
        cfg.alpha = [cfg.alpha]
    try:
        cfg.alpha = [float(a) for a in cfg.alpha]
        cfg.window = [float(w) for w in cfg.window]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad numeric value in configuration: {exc}") from exc
    cfg.validate()
    return cfg


# -- output helpers ----------------------------------------------------------


def _fmt(value: float, digits: int = 6) -> str:
    return f"{value:.{digits}f}"


def write_output(text: str, path: str | None):
    """Atomic write: temp file in the target directory, then rename."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".fracdirac-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _grid_table(header, rows) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    line = lambda cells: "  ".join(str(c).rjust(w) for c, w in zip(cells, widths))
    sep = "-" * (sum(widths) + 2 * (len(widths) - 1))
    return "\n".join([line(header), sep, *(line(r) for r in rows)]) + "\n"


def _runs(cfg: RunConfig):
    """(label, alpha-or-None, problem) for every requested run."""
    if cfg.method == "classical":
        return [("Classical", None, cfg.problem(1.0))]
    return [("Fractal", a, cfg.problem(a)) for a in cfg.alpha]


def _meta(cfg: RunConfig) -> dict:
    return {"steps": cfg.steps, "tol": cfg.tol, "scan_points": cfg.scan_points,
            "method": cfg.method, "version": __version__}


# -- commands ----------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    results = []
    for label, alpha, problem in _runs(cfg):
        spectrum = solve_spectrum(cfg.window, problem, cfg.integrator(), cfg.scan_points, cfg.tol)
        for failure in spectrum.failures:
            print(f"warning: bracket {failure.bracket} failed: {failure.reason}", file=sys.stderr)
        results.append((label, alpha, problem, spectrum))

    if cfg.output_format == "json":
        text = _json([
            {
                "problem": {"p": render(pr.p), "r": render(pr.r), "a": pr.a, "b": pr.b},
                "alpha": alpha,
                "eigenvalues": [
                    {"lambda": e.lambda_n, "weight": e.weight_alpha_n, "beta": e.beta_n, "residual": e.residual}
                    for e in sp
                ],
                "meta": _meta(cfg),
            }
            for _, alpha, pr, sp in results
        ])
    elif cfg.output_format == "csv":
        rows = [
            [label, "N/A" if alpha is None else alpha, e.index, repr(e.lambda_n), repr(e.weight_alpha_n),
             repr(e.beta_n), repr(e.residual), repr(e.delta_slope)]
            for label, alpha, _, sp in results for e in sp
        ]
        text = _csv(["method", "alpha", "index", "lambda", "weight", "beta", "residual", "delta_slope"], rows)
    else:
        width = max([len(sp) for *_, sp in results] + [1])
        header = ["Method", "alpha"] + [f"lambda_{n}" for n in range(1, width + 1)]
        rows = []
        for label, alpha, _, sp in results:
            vals = [_fmt(v) for v in sp.eigenvalues] + ["-"] * (width - len(sp))
            rows.append([label, "N/A" if alpha is None else alpha, *vals])
        text = _grid_table(header, rows)
        if cfg.verbose:
            detail = [
                [label, "N/A" if alpha is None else alpha, e.index, _fmt(e.lambda_n, 9),
                 f"{e.weight_alpha_n:.6g}", f"{e.beta_n:.6g}", f"{e.residual:.2e}", f"{e.delta_slope:.6g}"]
                for label, alpha, _, sp in results for e in sp
            ]
            text += "\n" + _grid_table(
                ["Method", "alpha", "n", "lambda_n", "weight", "beta", "residual", "dDelta/dlam"], detail
            )
    write_output(text, cfg.output_path)
    return EXIT_OK if any(len(sp) for *_, sp in results) else EXIT_NUMERIC


def cmd_scan(cfg: RunConfig) -> int:
    runs = []
    for label, alpha, problem in _runs(cfg):
        samples = scan_characteristic(cfg.window[0], cfg.window[1], cfg.scan_points, problem, cfg.integrator())
        brackets, unresolved = find_brackets(samples)
        runs.append((label, alpha, samples, brackets, unresolved))
    if cfg.output_format == "json":
        text = _json([
            {"method": label, "alpha": alpha,
             "samples": [[s.lam, s.delta if s.ok else None] for s in samples],
             "brackets": [list(b) for b in brackets],
             "unresolved": [list(u) for u in unresolved],
             "meta": _meta(cfg)}
            for label, alpha, samples, brackets, unresolved in runs
        ])
    else:
        rows = []
        for label, alpha, samples, brackets, _ in runs:
            starts = {b[0] for b in brackets}
            for s in samples:
                rows.append([label, "N/A" if alpha is None else alpha, repr(s.lam),
                             repr(s.delta) if s.ok else "nan", int(s.lam in starts)])
        if cfg.output_format == "csv":
            text = _csv(["method", "alpha", "lambda", "delta", "bracket_start"], rows)
        else:
            text = ""
            for label, alpha, samples, brackets, unresolved in runs:
                tag = "N/A" if alpha is None else alpha
                text += f"{label} alpha={tag}: {len(samples)} samples, {len(brackets)} brackets\n"
                for lo, hi in brackets:
                    text += f"  sign change in [{lo:.6f}, {hi:.6f}]\n"
                for lo, hi in unresolved:
                    text += f"  unresolved (diverged) in [{lo:.6f}, {hi:.6f}]\n"
    write_output(text, cfg.output_path)
    return EXIT_OK


def table_cells(number: int, steps: int = DEFAULT_STEPS, scan_points=DEFAULT_SCAN_POINTS,
                tol=DEFAULT_TOL, printed=False):
    """Compare every published cell of one example; returns (runs, cells)."""
    ex = EXAMPLES[number]
    runs = [("Classical", None, ex.classical, ex.problem(1.0, steps, printed), Method.CLASSICAL)]
    runs += [("Fractal", a, ex.fractal[a], ex.problem(a, steps, printed), Method.FRACTAL) for a in ALPHAS]
    solved, cells = [], []
    for label, alpha, expected, problem, method in runs:
        sp = solve_spectrum((0.0, math.pi), problem, IntegratorConfig(method), scan_points, tol)
        found = sp.eigenvalues
        solved.append((label, alpha, expected, found))
        tag = "N/A" if alpha is None else alpha
        cells.append({
            "row": label, "alpha": tag, "cell": "count", "expected": len(expected),
            "found": len(found), "tol": 0, "passed": len(found) == len(expected),
        })
        for n, want in enumerate(expected, start=1):
            got = found[n - 1] if n <= len(found) else None
            tol_n = cell_tolerance(alpha, want)
            cells.append({
                "row": label, "alpha": tag, "cell": f"lambda_{n}", "expected": want, "found": got,
                "tol": tol_n, "passed": got is not None and abs(got - want) <= tol_n,
            })
    return solved, cells


def cmd_table(cfg: RunConfig) -> int:
    if cfg.example is None:
        raise UsageError("table needs --example 1|2|3")
    ex = EXAMPLES[cfg.example]
    solved, cells = table_cells(cfg.example, cfg.steps, cfg.scan_points, cfg.tol, cfg.printed)
    ok = all(c["passed"] for c in cells)
    classical = solved[0][3]
    fractal1 = next(found for label, a, _, found in solved if a == 1.0)
    gaps = [abs(c - f) for c, f in zip(classical, fractal1)]

    if cfg.output_format == "json":
        text = _json({"example": cfg.example,
                      "p": ex.printed_p if cfg.printed else ex.p,
                      "r": ex.printed_r if cfg.printed else ex.r,
                      "rows": [{"method": l, "alpha": a, "eigenvalues": f} for l, a, _, f in solved],
                      "gaps": gaps, "cells": cells, "passed": ok, "meta": _meta(cfg)})
    elif cfg.output_format == "csv":
        text = _csv(["row", "alpha", "cell", "expected", "found", "tol", "status"],
                    [[c["row"], c["alpha"], c["cell"], c["expected"], "" if c["found"] is None else c["found"],
                      c["tol"], "PASS" if c["passed"] else "FAIL"] for c in cells])
    else:
        width = max(len(e) for *_, e, _ in solved)
        header = ["Method", "alpha"] + [f"lambda_{n}" for n in range(1, width + 1)]
        status = {(c["row"], c["alpha"], c["cell"]): c["passed"] for c in cells}
        rows = []
        for label, alpha, expected, found in solved:
            tag = "N/A" if alpha is None else alpha
            vals = []
            for n in range(1, width + 1):
                if n <= len(found):
                    mark = "" if status.get((label, tag, f"lambda_{n}"), True) else " FAIL"
                    vals.append(_fmt(found[n - 1]) + mark)
                else:
                    vals.append("-")
            rows.append([label, tag, *vals])
        p = ex.printed_p if cfg.printed else ex.p
        r = ex.printed_r if cfg.printed else ex.r
        text = f"Example {cfg.example}: p = {p}, r = {r}, steps = {cfg.steps}\n\n"
        text += _grid_table(header, rows)
        text += "\n" + _grid_table(
            ["n", "Classical", "|classical - fractal(1.0)|", "published"],
            [[n, _fmt(c), f"{g:.2e}", f"{pg:.2e}"]
             for n, (c, g, pg) in enumerate(zip(classical, gaps, ex.published_gaps), start=1)],
        )
        text += "\n"
        for c in cells:
            found = "-" if c["found"] is None else c["found"]
            text += (f"{'PASS' if c['passed'] else 'FAIL'}  {c['row']:<9} alpha={c['alpha']!s:<4} "
                     f"{c['cell']:<9} expected {c['expected']} found {found} tol {c['tol']:.3g}\n")
    write_output(text, cfg.output_path)
    return EXIT_OK if ok else EXIT_FAIL


def _suffixed(path: str, alpha) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_alpha{alpha}{ext}"


def cmd_eigenfunction(cfg: RunConfig) -> int:
    outputs = []
    runs = _runs(cfg)
    for label, alpha, problem in runs:
        sp = solve_spectrum(cfg.window, problem, cfg.integrator(), cfg.scan_points, cfg.tol)
        if cfg.index > len(sp):
            tag = "N/A" if alpha is None else alpha
            print(f"error: eigenpair {cfg.index} not found for alpha={tag} "
                  f"({len(sp)} eigenvalues in window)", file=sys.stderr)
            return EXIT_NOT_FOUND
        pair = sp[cfg.index - 1]
        phi = pair.phi
        if cfg.output_format == "json":
            text = _json({"method": label, "alpha": alpha, "index": pair.index, "lambda": pair.lambda_n,
                          "x": phi.x.tolist(), "S": phi.grid.staircase_nodes.tolist(),
                          "f1": phi.f1.tolist(), "f2": phi.f2.tolist(), "meta": _meta(cfg)})
        else:
            rows = zip(map(repr, phi.x.tolist()), map(repr, phi.grid.staircase_nodes.tolist()),
                       map(repr, phi.f1.tolist()), map(repr, phi.f2.tolist()))
            text = _csv(["x", "S", "f1", "f2"], rows)
        outputs.append((alpha, text))
    if cfg.output_path is None:
        for _, text in outputs:
            sys.stdout.write(text)
    elif len(outputs) == 1:
        write_output(outputs[0][1], cfg.output_path)
    else:
        for alpha, text in outputs:
            write_output(text, _suffixed(cfg.output_path, alpha))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    checks = run_suite(cfg.suite)
    if cfg.output_format == "json":
        text = _json([c.__dict__ for c in checks])
    elif cfg.output_format == "csv":
        text = _csv(["suite", "label", "value", "threshold", "status"],
                    [[c.suite, c.label, repr(c.value), c.threshold, "PASS" if c.passed else "FAIL"] for c in checks])
    else:
        text = "".join(c.line() + "\n" for c in checks)
        passed = sum(c.passed for c in checks)
        text += f"{passed}/{len(checks)} checks passed\n"
    write_output(text, cfg.output_path)
    return EXIT_OK if all_passed(checks) else EXIT_FAIL


HANDLERS = {
    "solve": cmd_solve,
    "scan": cmd_scan,
    "table": cmd_table,
    "eigenfunction": cmd_eigenfunction,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        if cfg.command in ("solve", "scan", "eigenfunction"):
            for text in cfg.coefficients():
                parse_coefficient(text)
        if args.dump_config:
            write_output(json.dumps(asdict(cfg), indent=2, sort_keys=True) + "\n", args.dump_config)
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExpressionSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        if exc.source:
            print(f"  {exc.source}", file=sys.stderr)
            col = len(exc.source.encode("utf-8")[: exc.offset].decode("utf-8", "ignore"))
            print("  " + " " * col + "^", file=sys.stderr)
        return EXIT_USAGE
    except FracDiracError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
