"""Command-line entry point.

Verbs:
  run     execute a scenario, write table.csv, curves.csv, diagnostics.json
  table   print the results table to stdout (3 decimals)
  curves  emit the curve CSV (stdout, or curves.csv under --out)

Exit codes: 0 all requested methods converged, 1 usage/input/output error,
2 at least one method reported converged=false (outputs are still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import RecalError, ScenarioError
from .eval_report import (
    FunctionalSpec,
    build_results_table,
    curves_to_csv,
    export_curves,
    format_table,
    table_to_csv,
)
from .recal_methods import RecalResult, source_implied_auc
from .scenario import Scenario, _parse_methods, parse_scenario, run_methods


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; keep 2 reserved for
    # non-convergence and report usage problems as generic failures
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"recal: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recal", description="Recalibrate a discrete binary classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", required=True, help="path of the scenario JSON file")
        p.add_argument(
            "--methods",
            help="comma-separated method names or 'all' (overrides the scenario)",
        )
        p.add_argument(
            "--functional", help="functional id, e.g. 'sqrt' (overrides the scenario)"
        )
        p.add_argument("--tol-mean", type=float, help="mean-matching tolerance override")
        p.add_argument("--tol-auc", type=float, help="AUC-matching tolerance override")
        p.add_argument("--max-iter", type=int, help="iteration cap override")

    p_run = sub.add_parser("run", help="run the scenario and write output files")
    add_common(p_run)
    p_run.add_argument("--out", default=".", help="output directory (default: .)")

    p_table = sub.add_parser("table", help="print the results table")
    add_common(p_table)

    p_curves = sub.add_parser("curves", help="emit the curve CSV")
    add_common(p_curves)
    p_curves.add_argument("--out", help="write curves.csv into this directory")

    return parser


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    if args.methods is not None:
        spec = args.methods
        parsed = _parse_methods(
            "all" if spec == "all" else [m.strip() for m in spec.split(",")]
        )
        scenario = replace(scenario, methods=parsed)
    if args.functional is not None:
        scenario = replace(scenario, functional=FunctionalSpec.from_id(args.functional))
    settings = scenario.settings
    if args.tol_mean is not None:
        if args.tol_mean <= 0:
            raise ScenarioError("--tol-mean: must be positive")
        settings = replace(settings, tol_mean=args.tol_mean)
    if args.tol_auc is not None:
        if args.tol_auc <= 0:
            raise ScenarioError("--tol-auc: must be positive")
        settings = replace(settings, tol_auc=args.tol_auc)
    if args.max_iter is not None:
        if args.max_iter < 1:
            raise ScenarioError("--max-iter: must be a positive integer")
        settings = replace(settings, max_iter=args.max_iter)
    if settings is not scenario.settings:
        scenario = replace(scenario, settings=settings)
    return scenario


def _diagnostics_payload(scenario: Scenario, results: list[RecalResult]) -> dict:
    methods = {}
    for result in results:
        diag = result.diagnostics
        methods[result.method.value] = {
            "iterations": diag.iterations,
            "converged": diag.converged,
            "residual_mean": diag.residual_mean,
            "residual_auc": diag.residual_auc,
            "residual_fixed_point": diag.residual_fixed_point,
            "bracket": list(diag.bracket) if diag.bracket is not None else None,
            "params": result.params,
            "achieved_mean": result.achieved_mean,
            "implied_auc": result.implied_auc,
        }
    return {
        "source": {
            "prior": scenario.source.prior,
            "implied_auc": source_implied_auc(scenario.source),
        },
        "target": {"prior": scenario.target.prior},
        "methods": methods,
        "all_converged": all(r.diagnostics.converged for r in results),
    }


def _run_command(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    results = run_methods(scenario)
    table = build_results_table(scenario.source, scenario.target, results, scenario.functional)
    curves = export_curves(scenario.source, scenario.target, results)
    payload = _diagnostics_payload(scenario, results)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "table.csv").write_text(table_to_csv(table), encoding="utf-8", newline="\n")
        (out_dir / "curves.csv").write_text(curves_to_csv(curves), encoding="utf-8", newline="\n")
        (out_dir / "diagnostics.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
            newline="\n",
        )
    except OSError as exc:
        print(f"recal: error: cannot write outputs: {exc}", file=sys.stderr)
        return 1
    for result in results:
        diag = result.diagnostics
        print(
            f"{result.method.value}: converged={diag.converged} "
            f"iterations={diag.iterations}"
        )
    if not payload["all_converged"]:
        print("recal: warning: at least one method did not converge", file=sys.stderr)
        return 2
    return 0


def _table_command(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    results = run_methods(scenario)
    table = build_results_table(scenario.source, scenario.target, results, scenario.functional)
    sys.stdout.write(format_table(table))
    return 0 if all(r.diagnostics.converged for r in results) else 2


def _curves_command(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    results = run_methods(scenario)
    csv_text = curves_to_csv(export_curves(scenario.source, scenario.target, results))
    if args.out is None:
        sys.stdout.write(csv_text)
    else:
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "curves.csv").write_text(csv_text, encoding="utf-8", newline="\n")
        except OSError as exc:
            print(f"recal: error: cannot write outputs: {exc}", file=sys.stderr)
            return 1
    return 0 if all(r.diagnostics.converged for r in results) else 2


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "run":
            return _run_command(args)
        if args.command == "table":
            return _table_command(args)
        return _curves_command(args)
    except RecalError as exc:
        print(f"recal: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
