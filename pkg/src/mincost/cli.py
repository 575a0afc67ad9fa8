"""Command-line entry point ``mincost``.

Exit codes: 0 success, 1 an embedded expectation failed, 2 the scenario could
not be parsed, 3 validation error, 4 the oracle did not converge.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Optional

from . import scenario as sc
from .errors import MincostError, NoConvergence, ScenarioParseError

GLOBAL_DEFAULTS = {
    "out": None, "seed": None, "tol": None, "cost_tol": None,
    "restarts": None, "max_iters": None, "format": "json",
}
EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_VALIDATION, EXIT_NO_CONVERGENCE = 0, 1, 2, 3, 4


def _json_arg(text: str):
    """Inline JSON, or a path to a JSON file."""
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid JSON argument: {exc}") from exc


def _family_spec(args) -> dict:
    return {"type": "coherent", "alpha": args.alpha, "n": args.n}


def _cost_spec(text: Optional[str]) -> Optional[dict]:
    if text is None:
        return None
    value = _json_arg(text)
    return value if isinstance(value, dict) else {"type": "matrix", "matrix": value}


def scenario_from_args(args) -> dict:
    cmd = args.command
    if cmd == "bound":
        data = {
            "name": "bound", "kind": "bound", "ensemble": _family_spec(args),
            "cost": _cost_spec(args.cost),
            "options": {"round_digits": args.round_digits, "oracle": not args.no_oracle},
        }
    elif cmd == "sequence":
        if args.function == "step":
            fn = {"type": "step", "threshold": args.threshold}
        elif args.function == "linear":
            fn = {"type": "linear", "a": args.a, "b": args.b}
        else:
            fn = {"type": "table", "values": _json_arg(args.values),
                  "convex": args.convex, "concave": args.concave}
        ens = {"type": "zero_plus"} if args.alphabet == "zero_plus" else _family_spec(args)
        data = {
            "name": "sequence", "kind": "sequence", "ensemble": ens,
            "sequence": {"length": args.length, "function": fn},
            "options": {"global_oracle": args.global_oracle, "pbr": args.pbr,
                        "convexity": args.convex or args.concave},
        }
        if args.cost is not None:
            data["cost"] = _cost_spec(args.cost)
    elif cmd == "oracle":
        if args.states is not None:
            ens = {"type": "pure", "states": _json_arg(args.states)}
        else:
            ens = _family_spec(args)
        data = {"name": "oracle", "kind": "oracle", "ensemble": ens,
                "options": {"include_povm": args.include_povm}}
        if args.cost is not None:
            data["cost"] = _cost_spec(args.cost)
    else:
        raise ValueError(cmd)
    data = {k: v for k, v in data.items() if v is not None}
    sc.validate_scenario(data)
    return data


def format_text(report: dict) -> str:
    lines = [f"scenario {report['name']} ({report['kind']})"]
    for key in sorted(report["results"]):
        lines.append(f"  {key}: {json.dumps(report['results'][key])}")
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        want = {k: c[k] for k in ("value", "tol", "min", "max") if k in c}
        lines.append(f"  [{status}] {c['key']} = {json.dumps(c['actual'])} expected {json.dumps(want)}")
    lines.append("passed" if report["passed"] else "FAILED")
    return "\n".join(lines) + "\n"


def _render(report: dict, fmt: str) -> str:
    return sc.dumps(report) if fmt == "json" else format_text(report)


def _write_atomic(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".mincost-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _write_atomic(out, text)


def _overrides(args) -> dict:
    return {"seed": args.seed, "residual_tol": args.tol, "cost_tol": args.cost_tol,
            "restarts": args.restarts, "max_iters": args.max_iters}


def _run_all(args) -> int:
    code = EXIT_OK
    ext = "json" if args.format == "json" else "txt"
    for name in sc.bundled_names():
        try:
            report = sc.run_scenario(sc.load_scenario(name), **_overrides(args))
        except NoConvergence as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            code = max(code, EXIT_NO_CONVERGENCE)
            continue
        text = _render(report, args.format)
        if args.out:
            _write_atomic(os.path.join(args.out, f"{name}.{ext}"), text)
        else:
            sys.stdout.write(text)
        if not report["passed"]:
            code = max(code, EXIT_FAILED)
    return code


def _list(args) -> int:
    rows = []
    for name in sc.bundled_names():
        data = sc.load_scenario(name)
        rows.append({"name": name, "kind": data["kind"], "description": data.get("description", "")})
    if args.format == "json":
        _emit(json.dumps(rows, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit("".join(f"{r['name']:<24} {r['kind']:<15} {r['description']}\n" for r in rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS so a flag given before the subcommand is not reset by the subparser
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--out", help="write the report here instead of stdout (a directory with run --all)")
    common.add_argument("--seed", type=int, help="oracle seed (default: $MINCOST_SEED or 0)")
    common.add_argument("--tol", type=float, help="Helstrom certificate tolerance (oracle residual_tol)")
    common.add_argument("--cost-tol", type=float, help="oracle duality-gap tolerance")
    common.add_argument("--restarts", type=int, help="oracle restarts")
    common.add_argument("--max-iters", type=int, help="oracle iteration limit")
    common.add_argument("--format", choices=("json", "text"), help="report format (default json)")

    p = argparse.ArgumentParser(prog="mincost", description="Minimum-cost quantum measurement toolkit.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a scenario file or bundled scenario name")
    run.add_argument("file", nargs="?")
    run.add_argument("--all", action="store_true", help="run every bundled scenario")

    def family_args(q):
        q.add_argument("--alpha", type=float, default=2.0)
        q.add_argument("--n", type=int, default=4)

    b = sub.add_parser("bound", parents=[common], help="analytic bounds for a coherent family")
    family_args(b)
    b.add_argument("--cost", required=True, help="cost matrix as JSON (inline or file)")
    b.add_argument("--round-digits", type=int)
    b.add_argument("--no-oracle", action="store_true")

    s = sub.add_parser("sequence", parents=[common], help="sequence of local systems")
    s.add_argument("--alphabet", choices=("zero_plus", "coherent"), default="zero_plus")
    family_args(s)
    s.add_argument("--length", type=int, default=2)
    s.add_argument("--cost", help="local cost (default: minimum error)")
    s.add_argument("--function", choices=("step", "linear", "table"), default="step")
    s.add_argument("--threshold", type=float, default=2.0)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--b", type=float, default=0.0)
    s.add_argument("--values", help="table values as JSON")
    s.add_argument("--convex", action="store_true")
    s.add_argument("--concave", action="store_true")
    s.add_argument("--global-oracle", action="store_true")
    s.add_argument("--pbr", action="store_true")

    sub.add_parser("pbr-demo", parents=[common], help="run the bundled pbr_step scenario")

    o = sub.add_parser("oracle", parents=[common], help="numerical minimum cost")
    family_args(o)
    o.add_argument("--states", help="pure state vectors as JSON, overrides --alpha/--n")
    o.add_argument("--cost", help="cost matrix as JSON (default: minimum error)")
    o.add_argument("--include-povm", action="store_true")

    sub.add_parser("list-scenarios", parents=[common], help="list bundled scenarios")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        if args.command == "list-scenarios":
            return _list(args)
        if args.command == "run" and args.all:
            return _run_all(args)
        if args.command == "run":
            if not args.file:
                raise ScenarioParseError("run needs a scenario file or --all")
            data = sc.load_scenario(args.file)
        elif args.command == "pbr-demo":
            data = sc.load_scenario("pbr_step")
        else:
            data = scenario_from_args(args)
        report = sc.run_scenario(data, **_overrides(args))
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except MincostError as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _emit(_render(report, args.format), args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
