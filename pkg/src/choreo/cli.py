"""Command-line front end: check, project, run and difftest."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Any, Sequence

from . import ast as A
from .fixtures import FIXTURES, get_fixture, parse_assignment
from .oracle import GenConfig, diff_run, gen_choreography, shrink_failure
from .projector import KNOWN_FAULTS, ProjectError, inject_fault, project_process
from .reader import ParseError, print_choreography, print_network, read_choreography
from .runtime import ChoreoRuntimeError, DeadlockError, LabelMsg, format_payload, run_network

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3

FORMAT_ENV = "CHOREO_FORMAT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def json_value(v: Any) -> Any:
    if v is A.VOID:
        return None
    if isinstance(v, A.Symbol):
        return {"symbol": v.name}
    if isinstance(v, LabelMsg):
        return {"label": v.label}
    return v


class Output:
    def __init__(self, fmt: str, stream=None) -> None:
        self.fmt = fmt
        self.stream = stream or sys.stdout

    @property
    def structured(self) -> bool:
        return self.fmt == "json"

    def record(self, text: str, **data: Any) -> None:
        if self.structured:
            print(json.dumps(data, sort_keys=True), file=self.stream)
        else:
            print(text, file=self.stream)


def _load(path: str) -> A.ChorProgram:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"{path}: {err.strerror or err}") from err
    return read_choreography(text)


def _diagnose(out: Output, path: str, err: Exception) -> int:
    if isinstance(err, ParseError):
        out.record(
            f"{path}:{err.loc}: parse error: {err.message}" + (f" (expected {err.hint})" if err.hint else ""),
            kind="parse-error",
            file=path,
            line=err.loc.line,
            col=err.loc.col,
            message=err.message,
        )
        return EXIT_CHECK
    if isinstance(err, ProjectError):
        cause = err.cause
        out.record(
            f"{path}:{err.loc}: cannot project for {err.process}: {cause.reason}: "
            f"{print_network(cause.left)} vs {print_network(cause.right)}",
            kind="project-error",
            file=path,
            line=err.loc.line,
            col=err.loc.col,
            process=err.process,
            reason=cause.reason,
            left=print_network(cause.left),
            right=print_network(cause.right),
        )
        return EXIT_CHECK
    raise err


def _project_all(p: A.ChorProgram, only: str | None = None) -> dict[str, A.NetProgram]:
    if only is not None and only not in p.processes:
        raise UsageError(f"process {only!r} is not declared (declared: {' '.join(p.processes)})")
    names = [only] if only else list(p.processes)
    return {a: project_process(p, a) for a in names}


def cmd_check(args, out: Output) -> int:
    try:
        p = _load(args.file)
        _project_all(p)
    except (ParseError, ProjectError) as err:
        return _diagnose(out, args.file, err)
    out.record(f"{args.file}: ok ({len(p.processes)} processes)", kind="ok", file=args.file, processes=list(p.processes))
    return EXIT_OK


def cmd_project(args, out: Output) -> int:
    try:
        p = _load(args.file)
        programs = _project_all(p, args.process)
    except (ParseError, ProjectError) as err:
        return _diagnose(out, args.file, err)
    for name, prog in programs.items():
        text = print_network(prog)
        out.record(f"; {name}\n{text}", kind="projection", process=name, program=text)
    return EXIT_OK


def _overrides(assignments: Sequence[str]) -> dict:
    table: dict = {}
    for item in assignments:
        try:
            proc, name, value = parse_assignment(item)
        except ValueError as err:
            raise UsageError(str(err)) from err
        table.setdefault(proc, {})[name] = value
    return table


def cmd_run(args, out: Output) -> int:
    try:
        fixture = get_fixture(args.fixture)
    except KeyError as err:
        raise UsageError(err.args[0]) from err
    fixture = fixture.with_overrides(_overrides(args.set or []))
    try:
        p = _load(args.file)
        programs = _project_all(p)
    except (ParseError, ProjectError) as err:
        return _diagnose(out, args.file, err)
    for proc in fixture.per_process:
        if proc not in p.processes:
            raise UsageError(f"--set names undeclared process {proc!r}")
    try:
        result = run_network(programs, fixture.shared, per_process=fixture.per_process)
    except DeadlockError as err:
        out.record(f"{args.file}: {err}", kind="deadlock", file=args.file, waiting=err.waiting)
        return EXIT_RUNTIME
    except ChoreoRuntimeError as err:
        out.record(f"{args.file}: runtime error in {err.process}: {err.message}", kind="runtime-error",
                   file=args.file, process=err.process, message=err.message)
        return EXIT_RUNTIME
    for i, m in enumerate(result.trace, 1):
        out.record(f"{i}. {m.sender} -> {m.receiver}: {format_payload(m.payload)}",
                   kind="message", index=i, sender=m.sender, receiver=m.receiver, payload=json_value(m.payload))
    for name in p.processes:
        store = result.stores[name]
        shown = " ".join(f"{k}={A.format_value(v)}" for k, v in store.items())
        out.record(
            f"{name}: {A.format_value(result.values[name])}" + (f"  [{shown}]" if shown else ""),
            kind="process",
            process=name,
            value=json_value(result.values[name]),
            store={k: json_value(v) for k, v in store.items()},
        )
    return EXIT_OK


def cmd_difftest(args, out: Output) -> int:
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    try:
        base = GenConfig(seed=args.seed, max_depth=args.max_depth, max_processes=args.max_processes)
    except ValueError as err:
        raise UsageError(str(err)) from err

    def run() -> int:
        for i in range(args.count):
            prog = gen_choreography(replace(base, seed=args.seed + i))
            report = diff_run(prog)
            if report.ok:
                continue
            shrunk = shrink_failure(report)
            small, first = shrunk.program, shrunk.first
            out.record(
                f"mismatch at seed {args.seed + i}: {first}\nshrunk counterexample:\n{print_choreography(small)}",
                kind="mismatch",
                seed=args.seed + i,
                problem=first,
                program=print_choreography(small),
            )
            return EXIT_CHECK
        out.record(f"ok: {args.count} programs, 0 mismatches", kind="ok", count=args.count, seed=args.seed)
        return EXIT_OK

    if args.inject_fault:
        with inject_fault(args.inject_fault):
            return run()
    return run()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="choreo", description="Choreography checker, projector and runner.")
    parser.add_argument("--format", choices=("text", "json"), default=None,
                        help=f"output format (default: ${FORMAT_ENV} or text)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="parse and project; report merge failures")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("project", help="print the network program of each process")
    p.add_argument("file")
    p.add_argument("--process", "-p")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("run", help="project and execute concurrently")
    p.add_argument("file")
    p.add_argument("--fixture", default="none", help=f"builtin preset: {', '.join(sorted(FIXTURES))}")
    p.add_argument("--set", action="append", metavar="[P.]K=V", help="override a fixture constant")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("difftest", help="compare projected runs with the reference interpreter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=5)
    p.add_argument("--max-processes", type=int, default=4)
    p.add_argument("--inject-fault", choices=KNOWN_FAULTS, help="run against a deliberately broken projector")
    p.set_defaults(func=cmd_difftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or os.environ.get(FORMAT_ENV, "text")
    if fmt not in ("text", "json"):
        print(f"choreo: error: {FORMAT_ENV} must be 'text' or 'json'", file=sys.stderr)
        return EXIT_USAGE
    out = Output(fmt)
    try:
        return args.func(args, out)
    except UsageError as err:
        print(f"choreo: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
