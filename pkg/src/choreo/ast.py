"""Abstract syntax shared by the reader, projector, runtime and oracle.

Three layers live here:

* local expressions (``LocalExpr``) evaluated inside a single process,
* choreographies (``ChorExpr`` / ``ChorTerm`` / ``ChorProgram``),
* per-process network programs (``NetProgram``).

Every node is a frozen dataclass.  Source locations ride along on each node
but are excluded from equality and hashing, so ``==`` is structural.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True)
class Loc:
    line: int  # 1-indexed, 0 = unknown
    col: int  # 1-indexed

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOLOC = Loc(0, 0)


def _loc() -> Loc:
    return field(default=NOLOC, compare=False, repr=False)


ProcessName = str
Label = str

WILDCARD = "_"


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Symbol:
    """A quoted symbol such as ``'buy``."""

    name: str

    def __str__(self) -> str:
        return f"'{self.name}"


class _Void:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "VOID"

    def __reduce__(self):
        return (_Void, ())


VOID = _Void()

Value = Union[int, bool, str, Symbol, _Void]


def value_key(v: Value) -> tuple:
    """Hashable key that keeps ``True`` and ``1`` apart."""
    return (type(v).__name__, v)


def values_equal(a: Value, b: Value) -> bool:
    return value_key(a) == value_key(b)


def format_value(v: Value) -> str:
    if v is VOID:
        return "(void)"
    if isinstance(v, bool):
        return "#t" if v else "#f"
    if isinstance(v, str):
        return quote_string(v)
    return str(v)


def quote_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


# ---------------------------------------------------------------------------
# Local expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int | bool | str | Symbol
    loc: Loc = _loc()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Lit) and values_equal(self.value, other.value)

    def __hash__(self) -> int:
        return hash(value_key(self.value))


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Call:
    op: str
    args: tuple[LocalExpr, ...] = ()
    loc: Loc = _loc()


@dataclass(frozen=True)
class Block:
    body: tuple[LocalExpr, ...]
    loc: Loc = _loc()

    def __post_init__(self):
        if not self.body:
            raise ValueError("block must contain at least one expression")


LocalExpr = Union[Lit, Var, Call, Block]


def expr_equal(a: LocalExpr, b: LocalExpr) -> bool:
    """Structural identity of two local expressions, ignoring locations."""
    return a == b


def is_void_call(e: LocalExpr) -> bool:
    return isinstance(e, Call) and e.op == "void" and not e.args


# ---------------------------------------------------------------------------
# Choreographies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalBinding:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("empty identifier")


@dataclass(frozen=True)
class LocatedBinding:
    process: ProcessName
    name: str

    def __post_init__(self):
        if not self.name or not self.process:
            raise ValueError("empty identifier")


Binding = Union[GlobalBinding, LocatedBinding]


@dataclass(frozen=True)
class At:
    process: ProcessName
    exprs: tuple[LocalExpr, ...]
    loc: Loc = _loc()


@dataclass(frozen=True)
class Comm:
    source: ProcessName
    expr: LocalExpr
    target: ProcessName
    loc: Loc = _loc()


@dataclass(frozen=True)
class If:
    guard_at: ProcessName
    guard: LocalExpr
    then: ChorExpr
    orelse: ChorExpr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Sel:
    chooser: ProcessName
    pairs: tuple[tuple[Label, ProcessName], ...]
    body: ChorExpr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Let:
    bindings: tuple[tuple[Binding, ChorExpr], ...]
    body: ChorExpr
    loc: Loc = _loc()


@dataclass(frozen=True)
class LetStar:
    bindings: tuple[tuple[Binding, ChorExpr], ...]
    body: ChorExpr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Set:
    target: LocatedBinding
    value: ChorExpr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Seq:
    body: tuple[ChorExpr, ...]
    loc: Loc = _loc()

    def __post_init__(self):
        if not self.body:
            raise ValueError("seq must contain at least one expression")


@dataclass(frozen=True)
class Define:
    binding: Binding
    value: ChorExpr
    loc: Loc = _loc()


@dataclass(frozen=True)
class DefineComm:
    target: ProcessName
    name: str
    source: ProcessName
    expr: LocalExpr
    loc: Loc = _loc()


# Define forms may also appear in body position (sel~>, let and seq bodies).
ChorExpr = Union[At, Comm, If, Sel, Let, LetStar, Set, Seq, Define, DefineComm]


@dataclass(frozen=True)
class BareExpr:
    expr: ChorExpr
    loc: Loc = _loc()


ChorTerm = Union[Define, DefineComm, BareExpr]


@dataclass(frozen=True)
class ChorProgram:
    processes: tuple[ProcessName, ...]
    body: tuple[ChorTerm, ...]
    loc: Loc = _loc()


# ---------------------------------------------------------------------------
# Network programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Local:
    expr: LocalExpr


@dataclass(frozen=True)
class Void:
    pass


@dataclass(frozen=True)
class Send:
    peer: ProcessName
    expr: LocalExpr


@dataclass(frozen=True)
class Recv:
    peer: ProcessName


@dataclass(frozen=True)
class Choose:
    peer: ProcessName
    label: Label
    cont: NetProgram


@dataclass(frozen=True)
class Branch:
    peer: ProcessName
    arms: tuple[tuple[Label, NetProgram], ...]

    def __post_init__(self):
        labels = [lab for lab, _ in self.arms]
        if not labels:
            raise ValueError("branch needs at least one arm")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate branch labels in {labels}")

    def arm(self, label: Label) -> NetProgram | None:
        for lab, body in self.arms:
            if lab == label:
                return body
        return None


@dataclass(frozen=True)
class NIf:
    guard: LocalExpr
    then: NetProgram
    orelse: NetProgram


@dataclass(frozen=True)
class NLet:
    bindings: tuple[tuple[str, NetProgram], ...]
    body: NetProgram


@dataclass(frozen=True)
class NDefine:
    name: str
    value: NetProgram


@dataclass(frozen=True)
class NSet:
    name: str
    value: NetProgram


@dataclass(frozen=True)
class NSeq:
    body: tuple[NetProgram, ...]

    def __post_init__(self):
        if not self.body:
            raise ValueError("seq must contain at least one program")


NetProgram = Union[Local, Void, Send, Recv, Choose, Branch, NIf, NLet, NDefine, NSet, NSeq]


def local(e: LocalExpr) -> NetProgram:
    """Wrap a local expression; ``(void)`` is the network ``Void`` form."""
    return Void() if is_void_call(e) else Local(e)


# ---------------------------------------------------------------------------
# Traversals
# ---------------------------------------------------------------------------


def binding_processes(b: Binding) -> Iterator[ProcessName]:
    if isinstance(b, LocatedBinding):
        yield b.process


def expr_processes(e: ChorExpr) -> Iterator[ProcessName]:
    if isinstance(e, At):
        yield e.process
    elif isinstance(e, Comm):
        yield e.source
        yield e.target
    elif isinstance(e, If):
        yield e.guard_at
        yield from expr_processes(e.then)
        yield from expr_processes(e.orelse)
    elif isinstance(e, Sel):
        yield e.chooser
        for _, q in e.pairs:
            yield q
        yield from expr_processes(e.body)
    elif isinstance(e, (Let, LetStar)):
        for b, v in e.bindings:
            yield from binding_processes(b)
            yield from expr_processes(v)
        yield from expr_processes(e.body)
    elif isinstance(e, Set):
        yield e.target.process
        yield from expr_processes(e.value)
    elif isinstance(e, Seq):
        for sub in e.body:
            yield from expr_processes(sub)
    elif isinstance(e, (Define, DefineComm)):
        yield from term_processes(e)
    else:
        raise TypeError(f"not a choreography expression: {e!r}")


def term_processes(t: ChorTerm) -> Iterator[ProcessName]:
    if isinstance(t, Define):
        yield from binding_processes(t.binding)
        yield from expr_processes(t.value)
    elif isinstance(t, DefineComm):
        yield t.target
        yield t.source
    elif isinstance(t, BareExpr):
        yield from expr_processes(t.expr)
    else:
        raise TypeError(f"not a choreography term: {t!r}")


def mentioned_processes(p: ChorProgram) -> set[ProcessName]:
    """Every process named anywhere in the program: header plus body."""
    found = set(p.processes)
    for t in p.body:
        found.update(term_processes(t))
    return found


def net_peers(n: NetProgram) -> Iterator[ProcessName]:
    """Peers of every communication node in ``n``."""
    if isinstance(n, (Send, Recv)):
        yield n.peer
    elif isinstance(n, Choose):
        yield n.peer
        yield from net_peers(n.cont)
    elif isinstance(n, Branch):
        yield n.peer
        for _, arm in n.arms:
            yield from net_peers(arm)
    elif isinstance(n, NIf):
        yield from net_peers(n.then)
        yield from net_peers(n.orelse)
    elif isinstance(n, NLet):
        for _, v in n.bindings:
            yield from net_peers(v)
        yield from net_peers(n.body)
    elif isinstance(n, (NDefine, NSet)):
        yield from net_peers(n.value)
    elif isinstance(n, NSeq):
        for sub in n.body:
            yield from net_peers(sub)


def sort_arms(n: NetProgram) -> NetProgram:
    """Canonical form with every ``Branch`` arm list sorted by label."""
    if isinstance(n, Branch):
        return Branch(n.peer, tuple(sorted(((lab, sort_arms(a)) for lab, a in n.arms), key=lambda p: p[0])))
    if isinstance(n, Choose):
        return Choose(n.peer, n.label, sort_arms(n.cont))
    if isinstance(n, NIf):
        return NIf(n.guard, sort_arms(n.then), sort_arms(n.orelse))
    if isinstance(n, NLet):
        return NLet(tuple((x, sort_arms(v)) for x, v in n.bindings), sort_arms(n.body))
    if isinstance(n, NDefine):
        return NDefine(n.name, sort_arms(n.value))
    if isinstance(n, NSet):
        return NSet(n.name, sort_arms(n.value))
    if isinstance(n, NSeq):
        return NSeq(tuple(sort_arms(s) for s in n.body))
    return n
