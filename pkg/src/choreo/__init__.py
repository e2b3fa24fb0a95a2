"""Choreographic programming: parse, project with select-and-merge, run."""

from .ast import ChorProgram, NetProgram, expr_equal, mentioned_processes
from .oracle import GenConfig, diff_run, gen_choreography, interpret
from .projector import MergeError, ProjectError, merge, project_expr, project_program, project_term
from .reader import (
    ParseError,
    parse_choreography,
    parse_network,
    parse_sexpr,
    print_choreography,
    print_network,
    read_choreography,
    read_network,
)
from .runtime import DeadlockError, RunResult, run_network

__all__ = [
    "ChorProgram",
    "DeadlockError",
    "GenConfig",
    "MergeError",
    "NetProgram",
    "ParseError",
    "ProjectError",
    "RunResult",
    "diff_run",
    "expr_equal",
    "gen_choreography",
    "interpret",
    "mentioned_processes",
    "merge",
    "parse_choreography",
    "parse_network",
    "parse_sexpr",
    "print_choreography",
    "print_network",
    "project_expr",
    "project_program",
    "project_term",
    "read_choreography",
    "read_network",
    "run_network",
]
