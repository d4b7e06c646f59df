"""Command-line front end.

Exit codes: 0 success, 1 assignment violations (``validate``), 2 infeasible
instance, 3 search budget exceeded, 4 malformed input file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path as FsPath

from .estimators import ESTIMATORS, make_estimator
from .fixtures import FIXTURES, fixture_metadata
from .model import Assignment, ScenarioError, validate_assignment
from .oracle import BudgetExceeded
from .scenario import GenParams, envelope, generate, load_file, save
from .sweep import SweepSpec, sweep_csv

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_SCHEMA = 4


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        FsPath(out).write_text(text)


def _with_eta(scenario, eta: float):
    users = tuple(dataclasses.replace(u, eta=eta) for u in scenario.users)
    return dataclasses.replace(scenario, users=users)


def _arrivals(meta: dict) -> dict | None:
    rows = meta.get("arrivals")
    if not rows:
        return None
    return {(int(a["user"]), int(a["task"])): int(a["round"]) for a in rows}


def cmd_solve(args) -> int:
    sf = load_file(args.scenario)
    scenario = sf.scenario if args.eta is None else _with_eta(sf.scenario, args.eta)
    params = {"epsilon": args.epsilon, "zeta": args.zeta, "seed": args.seed,
              "budget": args.budget, "objective": args.objective}
    if args.algo == "adma":
        params["arrivals"] = _arrivals(sf.metadata)
        params["trace"] = args.trace
    est = make_estimator(args.algo, **params).fit(scenario)
    doc = est.report_.to_dict()
    doc["assignment"] = est.assignment_.to_dict() if est.assignment_ is not None else None
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    if est.report_.status in ("infeasible", "unbounded"):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        spec = SweepSpec.load(args.spec)
        if args.seeds is not None:
            spec = dataclasses.replace(spec, seeds=args.seeds)
    except (ValueError, KeyError, TypeError) as exc:
        raise ScenarioError(f"invalid sweep file: {exc}") from exc
    text = sweep_csv(spec)
    _emit(text, args.out)
    return EXIT_OK


def _load_assignment(path) -> Assignment:
    try:
        doc = json.loads(FsPath(path).read_text())
        if "paths" not in doc and isinstance(doc.get("assignment"), dict):
            doc = doc["assignment"]
        return Assignment.from_dict(doc)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise ScenarioError(f"invalid assignment file: {exc}") from exc


def cmd_validate(args) -> int:
    scenario = load_file(args.scenario).scenario
    violations = validate_assignment(scenario, _load_assignment(args.assignment))
    lines = [f"{v.kind}\t{v.index}\t{v.detail}" for v in violations]
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_VIOLATIONS if violations else EXIT_OK


def cmd_generate(args) -> int:
    try:
        doc = json.loads(FsPath(args.params).read_text()) if args.params else {}
        params = GenParams.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"invalid generation parameters: {exc}") from exc
    env = envelope(generate(params, args.seed), seed=args.seed, params=params)
    text = json.dumps(env, sort_keys=True, indent=1) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_fixture(args) -> int:
    scenario = FIXTURES[args.name]()
    if args.out in (None, "-"):
        save(scenario, sys.stdout, fixture_metadata(args.name))
    else:
        save(scenario, args.out, fixture_metadata(args.name))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgeoffload",
                                     description="Task offloading solvers for edge computing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one algorithm on one scenario file")
    p.add_argument("scenario")
    p.add_argument("--algo", choices=sorted(ESTIMATORS), default="cga")
    p.add_argument("--seed", type=int, default=0, help="tie-break / message-order seed")
    p.add_argument("--epsilon", type=float, default=1.0, help="MGA cost exponent")
    p.add_argument("--zeta", type=float, default=1.0, help="MGA demand exponent")
    p.add_argument("--eta", type=float, default=None,
                   help="override every user's fairness weight")
    p.add_argument("--budget", type=int, default=None, help="oracle search-space limit")
    p.add_argument("--objective", choices=("total", "fair"), default="total",
                   help="oracle objective")
    p.add_argument("--trace", default=None, help="ADMA message trace (JSON lines)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run a seeded sweep file and write CSV")
    p.add_argument("spec")
    p.add_argument("--seeds", type=int, default=None, help="override seeds per grid point")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check an assignment against a scenario")
    p.add_argument("scenario")
    p.add_argument("assignment", help="assignment JSON or a solve report")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a random scenario")
    p.add_argument("--params", default=None, help="JSON file of generation parameters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fixture", help="write one of the built-in example scenarios")
    p.add_argument("name", choices=sorted(FIXTURES))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
