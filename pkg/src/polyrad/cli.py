"""Command-line front end.

Subcommands
-----------
verify-polyharmonic   exact operator identity for m = 1..max-m
coeff-table           expansion-coefficient table as JSON
best-constant         closed-form best constant, optional quadrature cross-check
rayleigh              quotient sweep over dilations (CSV), optional probes
iterate               regularity chain: per-step CSV plus verification summary
classify              singular IVP against the dilation family
verify-all            the full acceptance suite

Exit codes: 0 all checks pass, 1 verification failure, 2 invalid arguments
(including a violated embedding condition alpha - 2m + 1 > 0).  JSON reports
carry a top-level ``schema_version``; numeric fields are rounded to 12
significant digits so reports are stable across runs.  CSV output uses comma
delimiters and ``.`` decimals regardless of locale.  The environment
variable POLYRAD_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import constants as const
from . import functionals as fun
from . import iteration as it
from . import ode
from . import suite
from .errors import PolyradError

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    output_format: str = "json"
    output_path: Optional[str] = None
    seed: int = suite.DEFAULT_SEED


def _round12(obj):
    """Round every float to 12 significant digits (report stability)."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, path: Optional[str]) -> None:
    body = dict(schema_version=SCHEMA_VERSION, **obj)
    _emit(json.dumps(_round12(body), indent=2, sort_keys=True) + "\n", path)


def _csv_text(header: List[str], rows: List[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Subcommand handlers (each returns the process exit code)
# ---------------------------------------------------------------------------


def _cmd_verify_polyharmonic(config: RunConfig) -> int:
    max_m = config.options["max_m"]
    result = suite.check_polyharmonic_identity(max_m=max_m)
    _emit_json(
        {
            "subcommand": "verify-polyharmonic",
            "max_m": max_m,
            "results": [
                {"m": m, "exact": ok} for m, ok in result.details["per_m"].items()
            ],
            "passed": result.passed,
        },
        config.output_path,
    )
    return 0 if result.passed else 1


def _cmd_coeff_table(config: RunConfig) -> int:
    text = suite.coeff_table_json(config.options["m"])
    _emit(text, config.output_path)
    return 0


def _cmd_best_constant(config: RunConfig) -> int:
    m, alpha = config.options["m"], config.options["alpha"]
    closed = const.best_constant(m, alpha)
    report = {"subcommand": "best-constant", **closed.to_json_obj()}
    ok = True
    if config.options["cross_check"]:
        quad = const.best_constant(m, alpha, route="quadrature")
        rel = abs(quad.S - closed.S) / closed.S
        ok = rel <= 1e-10
        report["cross_check"] = {
            "S_quadrature": quad.S,
            "rel_diff": rel,
            "agrees": ok,
        }
    _emit_json(report, config.output_path)
    return 0 if ok else 1


def _cmd_rayleigh(config: RunConfig) -> int:
    m, alpha = config.options["m"], config.options["alpha"]
    spec = fun.QuadratureSpec()
    s_closed = const.best_constant(m, alpha).S
    rows = []
    ok = True
    for eps in config.options["eps_list"]:
        q = fun.rayleigh_quotient(fun.bliss_profile(m, alpha, eps), m, alpha, spec)
        rel = abs(q - s_closed) / s_closed
        ok = ok and rel <= 1e-6
        rows.append([f"{eps:.12g}", q, s_closed, rel])
    if config.options["perturb"]:
        amp = config.options["perturb_amplitude"]
        w = fun.bliss_profile(m, alpha, 1.0)
        for index in range(len(fun.PERTURBATION_DIRECTIONS)):
            q = fun.rayleigh_quotient(
                w + amp * fun.perturbation_direction(index, m, alpha), m, alpha, spec
            )
            ok = ok and q >= s_closed - 1e-6
            rows.append([f"probe{index:02d}@{amp:g}", q, s_closed,
                         (q - s_closed) / s_closed])
    _emit(_csv_text(["epsilon", "quotient", "S_closed_form", "rel_diff"], rows),
          config.output_path)
    return 0 if ok else 1


def _cmd_iterate(config: RunConfig) -> int:
    opts = config.options
    m, alpha = opts["m"], opts["alpha"]
    grid = it.RadialGrid.geometric(opts["r_min"], opts["r_max"], opts["grid_points"])
    u = fun.bliss_profile(m, alpha, opts["eps"])
    chain = it.iterate_chain(u, m, alpha, grid)

    os.makedirs(opts["output_dir"], exist_ok=True)
    for k, gf in enumerate(chain.w):
        rows = [[float(r), float(v)] for r, v in zip(grid.nodes, gf.values)]
        _emit(_csv_text(["r", f"w_{k}"], rows), f"{opts['output_dir']}/chain_k{k}.csv")

    inverse = it.verify_inverse(chain, 1)
    decay = it.decay_report(chain)
    origin = it.origin_behavior(chain)
    fixed = it.fixed_point_residual(u, m, alpha, grid)
    q_ok = all(
        abs(q * (alpha + 2 * m + 1 - 4 * k) - 2 * (alpha + 1)) < 1e-9
        for k, q in enumerate(chain.q)
    )
    checks = {
        "q_sequence_closed_form": q_ok,
        "fd_inverse_residual": inverse.max_residual,
        "fixed_point_residual": fixed,
        "monotone_decreasing": all(
            bool(np.all(np.diff(gf.values) <= 0)) for gf in chain.w[1:]
        ),
        "decay": [
            {"k": e.k, "slope": e.slope, "bound_exponent": e.bound_exponent,
             "bound_satisfied": e.bound_satisfied, "skipped": e.skipped}
            for e in decay.entries
        ],
        "origin": [
            {"k": e.k, "value": e.value, "d1": e.d1, "d2": e.d2,
             "d2_expected": e.d2_expected, "d3": e.d3}
            for e in origin.entries
        ],
    }
    passed = (q_ok and checks["monotone_decreasing"]
              and inverse.max_residual <= 1e-4 and fixed <= 1e-3
              and all(e.bound_satisfied for e in decay.entries if not e.skipped))
    _emit_json(
        {"subcommand": "iterate", "m": m, "alpha": alpha, "eps": opts["eps"],
         "grid_points": opts["grid_points"], "checks": checks, "passed": passed},
        config.output_path,
    )
    return 0 if passed else 1


def _cmd_classify(config: RunConfig) -> int:
    opts = config.options
    m, alpha, eps, r_max = opts["m"], opts["alpha"], opts["eps"], opts["r_max"]
    if opts["perturb_index"] is None:
        report = ode.classification_check(m, alpha, eps, r_max)
        _emit_json({"subcommand": "classify", **report.to_json_obj()},
                   config.output_path)
        return 0 if report.verdict == "coincides" else 1
    data = list(ode.bliss_initial_data(m, alpha, eps))
    data[opts["perturb_index"]] *= opts["perturb_scale"]
    spec = ode.IVPSpec(m=m, alpha=alpha, even_initial=tuple(data),
                       r0=1e-4 * eps, r_max=r_max)
    try:
        result = ode.integrate(spec)
        reached = float(result.r[-1])
    except (ode.BlowupError, ode.StepUnderflowError) as err:
        result = err.result
        reached = float(result.r[-1])
    departure = ode.departure_from_family(m, alpha, result)
    verdict = "departs" if departure >= 0.01 else "coincides"
    _emit_json(
        {"subcommand": "classify", "m": m, "alpha": alpha, "eps": eps,
         "r_max": r_max, "perturb_index": opts["perturb_index"],
         "perturb_scale": opts["perturb_scale"], "reached_r": reached,
         "departure": departure, "steps": result.stats.steps,
         "verdict": verdict},
        config.output_path,
    )
    return 0 if verdict == "departs" else 1


def _cmd_verify_all(config: RunConfig) -> int:
    results = suite.run_all(quick=config.options["quick"], seed=config.seed,
                            golden=config.options["golden"])
    for result in results:
        print(result.line())
    passed = all(r.passed for r in results)
    report = {
        "subcommand": "verify-all",
        "quick": config.options["quick"],
        "seed": config.seed,
        "passed": passed,
        "checks": [
            {"criterion": r.criterion, "name": r.name, "passed": r.passed,
             "seconds": round(r.seconds, 3), "details": r.details}
            for r in results
        ],
    }
    if not passed:
        for r in results:
            if not r.passed:
                print(f"FAILED: {r.name}: {r.details}", file=sys.stderr)
    _emit_json(report, config.output_path)
    return 0 if passed else 1


_HANDLERS = {
    "verify-polyharmonic": _cmd_verify_polyharmonic,
    "coeff-table": _cmd_coeff_table,
    "best-constant": _cmd_best_constant,
    "rayleigh": _cmd_rayleigh,
    "iterate": _cmd_iterate,
    "classify": _cmd_classify,
    "verify-all": _cmd_verify_all,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyrad",
        description="Verification toolkit for the weighted radial polyharmonic calculus.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, with_malpha=True):
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, default=suite.DEFAULT_SEED,
                       help="seed for randomized samples")
        if with_malpha:
            p.add_argument("--m", type=int, required=True, help="operator order")
            p.add_argument("--alpha", type=float, required=True,
                           help="weight exponent (needs alpha - 2m + 1 > 0)")

    p = sub.add_parser("verify-polyharmonic",
                       help="exact operator identity for m = 1..max-m")
    p.add_argument("--max-m", type=int, default=8)
    common(p, with_malpha=False)

    p = sub.add_parser("coeff-table", help="expansion coefficient table as JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--output", help="write the table here instead of stdout")

    p = sub.add_parser("best-constant", help="best embedding constant")
    common(p)
    p.add_argument("--cross-check", action="store_true",
                   help="also compute the quadrature route and compare")

    p = sub.add_parser("rayleigh", help="Rayleigh quotient sweep (CSV)")
    common(p)
    p.add_argument("--eps-list", default="0.5,1,2",
                   help="comma-separated dilation parameters")
    p.add_argument("--perturb", action="store_true",
                   help="append the ten fixed perturbation probes")
    p.add_argument("--perturb-amplitude", type=float, default=0.1)

    p = sub.add_parser("iterate", help="regularity chain with verification summary")
    common(p)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=4096)
    p.add_argument("--r-min", type=float, default=1e-4)
    p.add_argument("--r-max", type=float, default=1e3)
    p.add_argument("--output-dir", default=".", help="directory for per-step CSV files")

    p = sub.add_parser("classify", help="singular IVP against the dilation family")
    common(p)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--r-max", type=float, default=20.0)
    p.add_argument("--perturb-index", type=int, default=None,
                   help="index of the even-order value to scale")
    p.add_argument("--perturb-scale", type=float, default=1.05)

    p = sub.add_parser("verify-all", help="run the full acceptance suite")
    p.add_argument("--quick", action="store_true",
                   help="cap grids at 1024 nodes and skip what needs more")
    p.add_argument("--golden", default=None,
                   help="path of the golden coefficient table")
    common(p, with_malpha=False)
    return parser


def _build_config(args: argparse.Namespace) -> RunConfig:
    options = {k: v for k, v in vars(args).items()
               if k not in ("subcommand", "output", "seed")}
    if "eps_list" in options:
        options["eps_list"] = [float(x) for x in options["eps_list"].split(",") if x]
    return RunConfig(
        subcommand=args.subcommand,
        options=options,
        output_path=getattr(args, "output", None),
        seed=getattr(args, "seed", suite.DEFAULT_SEED),
    )


def run(config: RunConfig) -> int:
    """Dispatch a parsed configuration; returns the exit code."""
    return _HANDLERS[config.subcommand](config)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    # validate the embedding condition before dispatch
    m = getattr(args, "m", None)
    alpha = getattr(args, "alpha", None)
    if m is not None and alpha is not None and args.subcommand != "coeff-table":
        if m < 1 or not alpha - 2 * m + 1 > 0:
            parser.error(
                f"Sobolev condition violated: alpha - 2m + 1 = {alpha - 2 * m + 1:g} "
                "must be positive"
            )
    if m is not None and args.subcommand == "coeff-table" and m < 1:
        parser.error("--m must be a positive integer")
    pi = getattr(args, "perturb_index", None)
    if pi is not None and not 0 <= pi < (m or 1):
        parser.error(f"--perturb-index must lie in [0, m), got {pi}")
    config = _build_config(args)
    try:
        return run(config)
    except PolyradError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
