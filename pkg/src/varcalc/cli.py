"""Command line: a thin client over the shared handlers.

Exit codes: 0 success, 1 parse/usage errors, 2 verification failure (the
residuals are printed).  Output is deterministic: identical invocations
produce byte-identical text.  `varc serve` starts the HTTP service on the
same handlers.
"""

from __future__ import annotations

import argparse
import json
import sys

from .api import HANDLERS, ProblemRequest, Report, UsageError, run_command
from .parser import ParseError, parse_problem_file


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="varc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--coords", default="", help="comma-separated base coordinates")
        p.add_argument("--fields", default="", help="comma-separated fiber coordinates")
        p.add_argument("--lagrangian", default=None, help="density expression")
        p.add_argument("--xi", default=None, help="vector field literal (ev/ins)")
        p.add_argument("--total", default=None, help="total field literal tot{...}")
        p.add_argument("--pair", action="append", default=[], help="'<vf> | <form>' literal")
        p.add_argument("--gauge", action="append", default=[], help="gauge{...} literal, one per parameter")
        p.add_argument("--brackets", default=None, help="bracket family JSON file")
        p.add_argument("--arity", type=int, default=3)
        p.add_argument("--order-bound", type=int, default=None, dest="order_bound")
        p.add_argument("--degree-bound", type=int, default=None, dest="degree_bound")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--problem", default=None, help="key: value problem file")
        p.add_argument("--format", choices=("text", "json", "latex"), default="text")
        p.add_argument("--jobs", type=int, default=1, help="accepted for compatibility")
        return p

    for name in HANDLERS:
        add(name, f"run the {name} computation")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _request_from_args(args: argparse.Namespace) -> ProblemRequest:
    values = {
        "coords": args.coords,
        "fields": args.fields,
        "lagrangian": args.lagrangian,
        "xi": args.xi,
        "total": args.total,
        "pair": list(args.pair),
        "gauge": list(args.gauge),
        "arity": args.arity,
        "order_bound": args.order_bound,
        "degree_bound": args.degree_bound,
        "seed": args.seed,
    }
    if args.problem:
        try:
            with open(args.problem) as fh:
                file_values = parse_problem_file(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read problem file: {exc}") from exc
        for key, val in file_values.items():
            key = key.replace("-", "_")
            if key not in values:
                raise UsageError(f"unknown problem key {key!r}")
            if not values[key] or values[key] is None:
                values[key] = val
    if args.brackets:
        try:
            with open(args.brackets) as fh:
                values["brackets"] = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read bracket file: {exc}") from exc
    return ProblemRequest(**values)


def _print_text(report: Report, latex: bool) -> None:
    for item in report.results:
        value = item.latex if latex and item.latex is not None else item.value
        print(f"{item.name} = {value}")
    if report.status != "ok":
        for item in report.residuals:
            value = item.latex if latex and item.latex is not None else item.value
            print(f"residual {item.name} = {value}")
    print(f"status: {report.status.upper()}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        req = _request_from_args(args)
        report = run_command(args.command, req)
    except (UsageError, ParseError) as exc:
        print(f"varc: error: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        print(report.model_dump_json(indent=2))
    else:
        _print_text(report, latex=(args.format == "latex"))
    return 0 if report.status == "ok" else 2


if __name__ == "__main__":
    sys.exit(main())
