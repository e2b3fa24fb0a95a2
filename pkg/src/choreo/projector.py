"""Endpoint projection: one network program per process, via select-and-merge."""

from __future__ import annotations

import contextlib
from typing import Iterator

from . import ast as A
from .ast import (
    Branch,
    Choose,
    Local,
    Loc,
    NDefine,
    NetProgram,
    NIf,
    NLet,
    NSeq,
    NSet,
    Recv,
    Send,
    Void,
)

CONSTRUCTOR_MISMATCH = "constructor-mismatch"
LOCAL_EXPR_MISMATCH = "local-expr-mismatch"
PEER_MISMATCH = "peer-mismatch"
LABEL_MISMATCH = "label-mismatch"
ARITY_MISMATCH = "arity-mismatch"

MERGE_REASONS = (CONSTRUCTOR_MISMATCH, LOCAL_EXPR_MISMATCH, PEER_MISMATCH, LABEL_MISMATCH, ARITY_MISMATCH)


class MergeError(Exception):
    """Two network programs have no merge.

    ``left``/``right`` are the deepest pair that failed, not necessarily the
    programs ``merge`` was called with.
    """

    def __init__(self, left: NetProgram, right: NetProgram, reason: str, loc: Loc = A.NOLOC) -> None:
        assert reason in MERGE_REASONS, reason
        self.left = left
        self.right = right
        self.reason = reason
        self.loc = loc
        super().__init__(self.describe())

    def describe(self) -> str:
        from .reader import print_network

        return f"{self.reason}: {print_network(self.left)} vs {print_network(self.right)}"


class ProjectError(Exception):
    def __init__(self, process: str, cause: MergeError, loc: Loc) -> None:
        self.process = process
        self.cause = cause
        self.loc = loc
        super().__init__(f"{loc}: cannot project for {process}: branches of this if do not merge ({cause.describe()})")


# Deliberate bugs for checking that the differential harness notices them.
_faults: set[str] = set()
KNOWN_FAULTS = ("merge-drop-arm",)


@contextlib.contextmanager
def inject_fault(name: str) -> Iterator[None]:
    if name not in KNOWN_FAULTS:
        raise ValueError(f"unknown fault {name!r}; choose from {', '.join(KNOWN_FAULTS)}")
    _faults.add(name)
    try:
        yield
    finally:
        _faults.discard(name)


@contextlib.contextmanager
def faults_suspended() -> Iterator[None]:
    saved = set(_faults)
    _faults.clear()
    try:
        yield
    finally:
        _faults.update(saved)


# ---------------------------------------------------------------------------
# Merge
# ---------------------------------------------------------------------------


def merge(n1: NetProgram, n2: NetProgram) -> NetProgram:
    """Combine the behaviours of ``n1`` and ``n2`` or raise ``MergeError``.

    Branches on the same peer take the union of their arms, merging arms that
    share a label.  Every other form must match its counterpart exactly up to
    the merge of its children.
    """
    if type(n1) is not type(n2):
        raise MergeError(n1, n2, CONSTRUCTOR_MISMATCH)

    if isinstance(n1, Void):
        return n1
    if isinstance(n1, Local):
        if not A.expr_equal(n1.expr, n2.expr):
            raise MergeError(n1, n2, LOCAL_EXPR_MISMATCH)
        return n1
    if isinstance(n1, Send):
        if n1.peer != n2.peer:
            raise MergeError(n1, n2, PEER_MISMATCH)
        if not A.expr_equal(n1.expr, n2.expr):
            raise MergeError(n1, n2, LOCAL_EXPR_MISMATCH)
        return n1
    if isinstance(n1, Recv):
        if n1.peer != n2.peer:
            raise MergeError(n1, n2, PEER_MISMATCH)
        return n1
    if isinstance(n1, Choose):
        if n1.peer != n2.peer:
            raise MergeError(n1, n2, PEER_MISMATCH)
        if n1.label != n2.label:
            raise MergeError(n1, n2, LABEL_MISMATCH)
        return Choose(n1.peer, n1.label, merge(n1.cont, n2.cont))
    if isinstance(n1, Branch):
        if n1.peer != n2.peer:
            raise MergeError(n1, n2, PEER_MISMATCH)
        return _merge_branch(n1, n2)
    if isinstance(n1, NIf):
        if not A.expr_equal(n1.guard, n2.guard):
            raise MergeError(n1, n2, LOCAL_EXPR_MISMATCH)
        return NIf(n1.guard, merge(n1.then, n2.then), merge(n1.orelse, n2.orelse))
    if isinstance(n1, NSeq):
        if len(n1.body) != len(n2.body):
            raise MergeError(n1, n2, ARITY_MISMATCH)
        return NSeq(tuple(merge(a, b) for a, b in zip(n1.body, n2.body)))
    if isinstance(n1, NLet):
        if [x for x, _ in n1.bindings] != [x for x, _ in n2.bindings]:
            raise MergeError(n1, n2, ARITY_MISMATCH)
        binds = tuple((x, merge(a, b)) for (x, a), (_, b) in zip(n1.bindings, n2.bindings))
        return NLet(binds, merge(n1.body, n2.body))
    if isinstance(n1, (NDefine, NSet)):
        if n1.name != n2.name:
            raise MergeError(n1, n2, ARITY_MISMATCH)
        return type(n1)(n1.name, merge(n1.value, n2.value))
    raise TypeError(f"not a network program: {n1!r}")


def _merge_branch(n1: Branch, n2: Branch) -> Branch:
    right = dict(n2.arms)
    arms = []
    for label, body in n1.arms:
        if label in right:
            arms.append((label, merge(body, right[label])))
        else:
            arms.append((label, body))
    if "merge-drop-arm" not in _faults:
        left = {label for label, _ in n1.arms}
        arms.extend((label, body) for label, body in n2.arms if label not in left)
    return Branch(n1.peer, tuple(arms))


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------


def _seq(parts: list[NetProgram]) -> NetProgram:
    return parts[0] if len(parts) == 1 else NSeq(tuple(parts))


def _binder(b: A.Binding, a: str) -> str:
    if isinstance(b, A.GlobalBinding):
        return b.name
    return b.name if b.process == a else A.WILDCARD


def desugar_let_star(e: A.LetStar) -> A.ChorExpr:
    """``let*`` as a chain of single-binding ``let`` forms."""
    if not e.bindings:
        return A.Let((), e.body, e.loc)
    body = e.body
    for binding in reversed(e.bindings):
        body = A.Let((binding,), body, e.loc)
    return body


def project_expr(e: A.ChorExpr, a: str) -> NetProgram:
    if isinstance(e, A.At):
        if e.process != a:
            return Void()
        return _seq([A.local(x) for x in e.exprs])
    if isinstance(e, A.Comm):
        if e.source == a:
            return Send(e.target, e.expr)
        if e.target == a:
            return Recv(e.source)
        return Void()
    if isinstance(e, A.If):
        then, orelse = project_expr(e.then, a), project_expr(e.orelse, a)
        if e.guard_at == a:
            return NIf(e.guard, then, orelse)
        try:
            return merge(then, orelse)
        except MergeError as err:
            err.loc = e.loc
            raise ProjectError(a, err, e.loc) from err
    if isinstance(e, A.Sel):
        return _project_sel(e.chooser, e.pairs, e.body, a)
    if isinstance(e, A.Let):
        binds = tuple((_binder(b, a), project_expr(v, a)) for b, v in e.bindings)
        return NLet(binds, project_expr(e.body, a))
    if isinstance(e, A.LetStar):
        return project_expr(desugar_let_star(e), a)
    if isinstance(e, A.Set):
        value = project_expr(e.value, a)
        return NSet(e.target.name, value) if e.target.process == a else value
    if isinstance(e, A.Seq):
        return NSeq(tuple(project_expr(x, a) for x in e.body))
    if isinstance(e, (A.Define, A.DefineComm)):
        return project_term(e, a)
    raise TypeError(f"not a choreography expression: {e!r}")


def _project_sel(chooser: str, pairs: tuple, body: A.ChorExpr, a: str) -> NetProgram:
    if not pairs:
        return project_expr(body, a)
    (label, target), rest = pairs[0], pairs[1:]
    cont = _project_sel(chooser, rest, body, a)
    if chooser == a:
        return Choose(target, label, cont)
    if target == a:
        return Branch(chooser, ((label, cont),))
    return cont


def project_term(t: A.ChorTerm, a: str) -> NetProgram:
    if isinstance(t, A.Define):
        return NDefine(_binder(t.binding, a), project_expr(t.value, a))
    if isinstance(t, A.DefineComm):
        if t.source == a:
            return Send(t.target, t.expr)
        if t.target == a:
            return NDefine(t.name, Recv(t.source))
        return Void()
    if isinstance(t, A.BareExpr):
        return project_expr(t.expr, a)
    raise TypeError(f"not a choreography term: {t!r}")


def project_process(p: A.ChorProgram, a: str) -> NetProgram:
    if a not in p.processes:
        raise ValueError(f"{a!r} is not a process of this choreography")
    parts = [project_term(t, a) for t in p.body]
    return NSeq(tuple(parts)) if parts else Void()


def project_program(p: A.ChorProgram) -> dict[str, NetProgram]:
    """Project ``p`` once per declared process, in declaration order."""
    return {a: project_process(p, a) for a in p.processes}
