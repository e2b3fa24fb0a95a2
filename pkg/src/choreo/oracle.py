"""Reference semantics and random programs for differential testing.

``interpret`` runs a choreography sequentially with a global view: it never
projects anything, so it can serve as ground truth for the projector plus
the concurrent runtime.  ``gen_choreography`` builds random choreographies
that are projectable by construction, and ``diff_run`` compares the two
executions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Mapping

from . import ast as A
from .ast import VOID, Value
from .projector import MergeError, ProjectError, faults_suspended, project_program
from .runtime import (
    Builtins,
    ChoreoRuntimeError,
    LabelMsg,
    Message,
    Store,
    eval_local,
    format_payload,
    merged_table,
    payload_key,
    run_network,
)

# ---------------------------------------------------------------------------
# Centralized interpreter
# ---------------------------------------------------------------------------


@dataclass
class GlobalState:
    stores: dict[str, dict[str, Value]]
    values: dict[str, Value]
    log: list[Message] = field(default_factory=list)

    def pair_log(self, sender: str, receiver: str) -> list:
        return [m.payload for m in self.log if m.sender == sender and m.receiver == receiver]


def _attribute(err: ChoreoRuntimeError, p: str) -> ChoreoRuntimeError:
    if err.process is None:
        err.process = p
        err.args = (f"{p}: {err.message}",)
    return err


class _Interpreter:
    def __init__(self, processes, builtins, per_process, initial) -> None:
        self.processes = tuple(processes)
        self.tables = {p: merged_table(builtins, per_process, p) for p in self.processes}
        self.stores = {p: Store((initial or {}).get(p)) for p in self.processes}
        self.log: list[Message] = []

    def _void(self) -> dict[str, Value]:
        return {p: VOID for p in self.processes}

    def _eval(self, p: str, e: A.LocalExpr) -> Value:
        try:
            return eval_local(e, self.stores[p], self.tables[p])
        except ChoreoRuntimeError as err:
            raise _attribute(err, p)

    def _bind_frames(self, bindings: list[tuple[A.Binding, dict[str, Value]]]) -> None:
        for p in self.processes:
            frame = {}
            for b, vals in bindings:
                if isinstance(b, A.GlobalBinding):
                    frame[b.name] = vals[p]
                elif b.process == p:
                    frame[b.name] = vals[p]
            self.stores[p].push(frame)

    def _pop_frames(self, n: int) -> None:
        for p in self.processes:
            for _ in range(n):
                self.stores[p].pop()

    def expr(self, e: A.ChorExpr) -> dict[str, Value]:
        """Evaluate ``e``; the result maps each process to its share of the value."""
        if isinstance(e, A.At):
            out = self._void()
            for x in e.exprs:
                out[e.process] = self._eval(e.process, x)
            return out
        if isinstance(e, A.Comm):
            v = self._eval(e.source, e.expr)
            self.log.append(Message(e.source, e.target, v))
            out = self._void()
            out[e.target] = v
            return out
        if isinstance(e, A.If):
            guard = self._eval(e.guard_at, e.guard)
            return self.expr(e.then if guard is not False else e.orelse)
        if isinstance(e, A.Sel):
            for label, q in e.pairs:
                self.log.append(Message(e.chooser, q, LabelMsg(label)))
            return self.expr(e.body)
        if isinstance(e, A.Let):
            evaluated = [(b, self.expr(v)) for b, v in e.bindings]
            self._bind_frames(evaluated)
            try:
                return self.expr(e.body)
            finally:
                self._pop_frames(1)
        if isinstance(e, A.LetStar):
            pushed = 0
            try:
                for b, v in e.bindings:
                    self._bind_frames([(b, self.expr(v))])
                    pushed += 1
                return self.expr(e.body)
            finally:
                self._pop_frames(pushed)
        if isinstance(e, A.Set):
            out = self.expr(e.value)
            p = e.target.process
            try:
                self.stores[p].assign(e.target.name, out[p])
            except ChoreoRuntimeError as err:
                raise _attribute(err, p)
            out[p] = VOID
            return out
        if isinstance(e, A.Seq):
            out = self._void()
            for sub in e.body:
                out = self.expr(sub)
            return out
        if isinstance(e, (A.Define, A.DefineComm)):
            return self.term(e)
        raise TypeError(f"not a choreography expression: {e!r}")

    def term(self, t: A.ChorTerm) -> dict[str, Value]:
        if isinstance(t, A.Define):
            vals = self.expr(t.value)
            for p in self.processes:
                if isinstance(t.binding, A.GlobalBinding) or t.binding.process == p:
                    self.stores[p].define(t.binding.name, vals[p])
            return self._void()
        if isinstance(t, A.DefineComm):
            v = self._eval(t.source, t.expr)
            self.log.append(Message(t.source, t.target, v))
            self.stores[t.target].define(t.name, v)
            return self._void()
        if isinstance(t, A.BareExpr):
            return self.expr(t.expr)
        raise TypeError(f"not a choreography term: {t!r}")


def interpret(
    p: A.ChorProgram,
    builtins: Builtins | None = None,
    *,
    per_process: Mapping[str, Builtins] | None = None,
    initial: Mapping[str, Mapping[str, Value]] | None = None,
) -> GlobalState:
    it = _Interpreter(p.processes, builtins, per_process, initial)
    values = it._void()
    for t in p.body:
        values = it.term(t)
    return GlobalState(
        stores={q: s.snapshot() for q, s in it.stores.items()},
        values=values,
        log=it.log,
    )


# ---------------------------------------------------------------------------
# Differential runs
# ---------------------------------------------------------------------------


@dataclass
class DiffReport:
    program: A.ChorProgram
    problems: list[str] = field(default_factory=list)
    oracle_error: str | None = None
    # "oracle", "projection", "run" or "compare"; None when everything agreed
    stage: str | None = None

    @property
    def ok(self) -> bool:
        return not self.problems and self.oracle_error is None

    @property
    def first(self) -> str | None:
        if self.oracle_error:
            return f"oracle failed: {self.oracle_error}"
        return self.problems[0] if self.problems else None


def _fmt(v: Value) -> str:
    return A.format_value(v)


def diff_run(
    p: A.ChorProgram,
    builtins: Builtins | None = None,
    *,
    per_process: Mapping[str, Builtins] | None = None,
    initial: Mapping[str, Mapping[str, Value]] | None = None,
) -> DiffReport:
    """Compare the centralized run of ``p`` with the run of its projection."""
    report = DiffReport(p)
    try:
        expected = interpret(p, builtins, per_process=per_process, initial=initial)
    except ChoreoRuntimeError as err:
        report.oracle_error = str(err)
        report.stage = "oracle"
        return report
    try:
        programs = project_program(p)
    except (ProjectError, MergeError) as err:
        report.problems.append(f"projection failed: {err}")
        report.stage = "projection"
        return report
    try:
        got = run_network(programs, builtins, per_process=per_process, initial=initial)
    except ChoreoRuntimeError as err:
        report.problems.append(f"distributed run failed: {err}")
        report.stage = "run"
        return report

    for q in p.processes:
        want, have = expected.stores[q], got.stores[q]
        for name in sorted(set(want) | set(have)):
            if name not in have:
                report.problems.append(f"store {q}.{name}: missing in distributed run (oracle {_fmt(want[name])})")
            elif name not in want:
                report.problems.append(f"store {q}.{name}: unexpected {_fmt(have[name])} in distributed run")
            elif not A.values_equal(want[name], have[name]):
                report.problems.append(f"store {q}.{name}: oracle {_fmt(want[name])}, distributed {_fmt(have[name])}")
        if not A.values_equal(expected.values[q], got.values[q]):
            report.problems.append(
                f"value of {q}: oracle {_fmt(expected.values[q])}, distributed {_fmt(got.values[q])}"
            )
    for (s, r), history in sorted(got.history.items()):
        want_log = expected.pair_log(s, r)
        if [payload_key(x) for x in want_log] != [payload_key(x) for x in history]:
            for i, (a, b) in enumerate(zip(want_log, history)):
                if payload_key(a) != payload_key(b):
                    report.problems.append(
                        f"log {s}->{r} position {i}: oracle {format_payload(a)}, distributed {format_payload(b)}"
                    )
                    break
            else:
                report.problems.append(f"log {s}->{r}: oracle sent {len(want_log)} messages, distributed {len(history)}")
    if report.problems:
        report.stage = "compare"
    return report


# ---------------------------------------------------------------------------
# Random projectable choreographies
# ---------------------------------------------------------------------------

TYPES = ("int", "bool", "str", "sym")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 3
    max_processes: int = 3
    max_fanout: int = 3
    max_terms: int = 5
    ints: tuple[int, ...] = (0, 1, 2, 3, 5, 7, 10, 42, -4)
    strings: tuple[str, ...] = ("", "a", "hello", "Left", "Right", "goodbye")
    symbols: tuple[str, ...] = ("buy", "ok", "x", "no")
    labels: tuple[str, ...] = ("l", "r", "yes", "no", "buy", "skip")

    def __post_init__(self):
        if self.max_processes < 2:
            raise ValueError("max_processes must be at least 2")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.max_fanout < 1 or self.max_terms < 1:
            raise ValueError("max_fanout and max_terms must be positive")
        if len(set(self.labels)) < 2:
            raise ValueError("need at least two distinct labels")


def process_names(n: int) -> list[str]:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return [letters[i] if i < len(letters) else f"P{i}" for i in range(n)]


# Names visible at each process, with their value types.
Scope = Mapping[str, Mapping[str, str]]


class _Generator:
    def __init__(self, cfg: GenConfig) -> None:
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        n = self.rng.randint(2, cfg.max_processes)
        self.procs = process_names(n)
        self.counter = 0

    def fresh(self, prefix: str = "v") -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def others(self, p: str) -> list[str]:
        return [q for q in self.procs if q != p]

    @staticmethod
    def extend(scope: Scope, p: str, name: str, ty: str | None) -> dict:
        new = {q: dict(names) for q, names in scope.items()}
        if ty is not None:
            new[p][name] = ty
        return new

    # -- local expressions -------------------------------------------------

    def lit(self, ty: str) -> A.Lit:
        c, r = self.cfg, self.rng
        if ty == "int":
            return A.Lit(r.choice(c.ints))
        if ty == "bool":
            return A.Lit(r.random() < 0.5)
        if ty == "str":
            return A.Lit(r.choice(c.strings))
        return A.Lit(A.Symbol(r.choice(c.symbols)))

    def local(self, p: str, ty: str, depth: int, scope: Scope) -> A.LocalExpr:
        r = self.rng
        names = [x for x, t in scope[p].items() if t == ty]
        if names and r.random() < 0.35:
            return A.Var(r.choice(names))
        if depth <= 0 or r.random() < 0.4:
            return self.lit(ty)
        d = depth - 1
        if r.random() < 0.1:
            other = r.choice(TYPES)
            return A.Block((self.local(p, other, d, scope), self.local(p, ty, d, scope)))
        if ty == "int":
            op = r.choice(["+", "-", "*"])
            return A.Call(op, (self.local(p, "int", d, scope), self.local(p, "int", d, scope)))
        if ty == "bool":
            k = r.randrange(5)
            if k == 0:
                op = r.choice(["<=", "<", ">=", ">"])
                return A.Call(op, (self.local(p, "int", d, scope), self.local(p, "int", d, scope)))
            if k == 1:
                return A.Call("not", (self.local(p, "bool", d, scope),))
            if k == 2:
                op = r.choice(["and", "or"])
                return A.Call(op, (self.local(p, "bool", d, scope), self.local(p, "bool", d, scope)))
            t = r.choice(TYPES)
            return A.Call("eq?", (self.local(p, t, d, scope), self.local(p, t, d, scope)))
        if ty == "str":
            return A.Call("string-append", (self.local(p, "str", d, scope), self.local(p, "str", d, scope)))
        return self.lit(ty)

    # -- choreography expressions -----------------------------------------

    def labels2(self) -> tuple[str, str]:
        a, b = self.rng.sample(self.cfg.labels, 2)
        return a, b

    def guarded(self, p: str, depth: int, scope: Scope, branch: Callable[[], A.ChorExpr]) -> A.If:
        # Both arms start by telling every other process which way we went.
        lt, lf = self.labels2()
        others = self.others(p)
        then = A.Sel(p, tuple((lt, q) for q in others), branch())
        orelse = A.Sel(p, tuple((lf, q) for q in others), branch())
        return A.If(p, self.local(p, "bool", 2, scope), then, orelse)

    def typed(self, q: str, ty: str, depth: int, scope: Scope) -> A.ChorExpr:
        """A choreography expression whose value at ``q`` has type ``ty``."""
        r = self.rng
        k = r.randrange(6) if depth > 0 else r.randrange(2)
        if k == 0:
            return A.At(q, (self.local(q, ty, 2, scope),))
        if k == 1:
            src = r.choice(self.others(q))
            return A.Comm(src, self.local(src, ty, 2, scope), q)
        if k == 2:
            return A.Seq((self.expr(depth - 1, scope), self.typed(q, ty, depth - 1, scope)))
        if k == 3:
            p = r.choice(self.procs)
            return self.guarded(p, depth, scope, lambda: self.typed(q, ty, depth - 1, scope))
        if k == 4:
            binds, inner = self.bindings(depth, scope, sequential=False)
            return A.Let(binds, self.typed(q, ty, depth - 1, inner))
        extra = self.local(q, r.choice(TYPES), 1, scope)
        return A.At(q, (extra, self.local(q, ty, 2, scope)))

    def binding_target(self, scope: Scope) -> tuple[A.Binding, str, str]:
        r = self.rng
        q, ty = r.choice(self.procs), r.choice(TYPES)
        if r.random() < 0.3:
            return A.GlobalBinding(self.fresh("g")), q, ty
        return A.LocatedBinding(q, self.fresh("x")), q, ty

    def bindings(self, depth: int, scope: Scope, sequential: bool):
        binds = []
        inner = scope
        for _ in range(self.rng.randint(1, 2)):
            b, q, ty = self.binding_target(scope)
            value = self.typed(q, ty, depth - 1, inner if sequential else scope)
            binds.append((b, value))
            inner = self.extend(inner, q, b.name, ty)
        return tuple(binds), inner

    def expr(self, depth: int, scope: Scope) -> A.ChorExpr:
        r = self.rng
        if depth <= 0 or r.random() < 0.3:
            kind = r.choice(["at", "comm", "comm", "set"])
        else:
            kind = r.choice(["if", "if", "sel", "let", "let*", "seq", "set", "comm"])
        if kind == "at":
            p = r.choice(self.procs)
            count = r.randint(1, 2)
            return A.At(p, tuple(self.local(p, r.choice(TYPES), 2, scope) for _ in range(count)))
        if kind == "comm":
            p = r.choice(self.procs)
            q = r.choice(self.others(p))
            return A.Comm(p, self.local(p, r.choice(TYPES), 2, scope), q)
        if kind == "set":
            targets = [(q, x, t) for q in self.procs for x, t in scope[q].items()]
            if not targets:
                return self.expr(0, scope) if depth > 0 else A.At(r.choice(self.procs), (self.lit("int"),))
            q, x, t = r.choice(targets)
            return A.Set(A.LocatedBinding(q, x), self.typed(q, t, depth - 1, scope))
        if kind == "if":
            p = r.choice(self.procs)
            return self.guarded(p, depth, scope, lambda: self.expr(depth - 1, scope))
        if kind == "sel":
            p = r.choice(self.procs)
            targets = r.sample(self.others(p), r.randint(1, min(self.cfg.max_fanout, len(self.procs) - 1)))
            pairs = tuple((r.choice(self.cfg.labels), q) for q in targets)
            return A.Sel(p, pairs, self.expr(depth - 1, scope))
        if kind in ("let", "let*"):
            star = kind == "let*"
            binds, inner = self.bindings(depth, scope, sequential=star)
            cls = A.LetStar if star else A.Let
            return cls(binds, self.expr(depth - 1, inner))
        parts = tuple(self.expr(depth - 1, scope) for _ in range(r.randint(2, 3)))
        return A.Seq(parts)

    def program(self) -> A.ChorProgram:
        r = self.rng
        scope: dict = {p: {} for p in self.procs}
        terms = []
        for _ in range(r.randint(min(2, self.cfg.max_terms), self.cfg.max_terms)):
            depth = r.randint(1, self.cfg.max_depth)
            k = r.randrange(4)
            if k == 0:
                q = r.choice(self.procs)
                src = r.choice(self.others(q))
                ty = r.choice(TYPES)
                name = self.fresh("d")
                terms.append(A.DefineComm(q, name, src, self.local(src, ty, 2, scope)))
                scope = self.extend(scope, q, name, ty)
            elif k == 1:
                b, q, ty = self.binding_target(scope)
                terms.append(A.Define(b, self.typed(q, ty, depth, scope)))
                scope = self.extend(scope, q, b.name, ty)
            else:
                terms.append(A.BareExpr(self.expr(depth, scope)))
        return A.ChorProgram(tuple(self.procs), tuple(terms))


def gen_choreography(c: GenConfig) -> A.ChorProgram:
    """A random choreography; the same config always yields the same program."""
    return _Generator(c).program()


def generate(seed: int, count: int, **overrides) -> Iterator[A.ChorProgram]:
    """``count`` programs from consecutive seeds starting at ``seed``."""
    base = GenConfig(**overrides)
    for i in range(count):
        yield gen_choreography(replace(base, seed=seed + i))


# ---------------------------------------------------------------------------
# Shrinking
# ---------------------------------------------------------------------------


def _expr_children(e: A.ChorExpr) -> Iterator[A.ChorExpr]:
    """Smaller expressions that could stand in for ``e``."""
    if isinstance(e, A.At) and len(e.exprs) > 1:
        for x in e.exprs:
            yield A.At(e.process, (x,), e.loc)
    if isinstance(e, A.If):
        yield e.then
        yield e.orelse
        for sub in _expr_children(e.then):
            yield replace(e, then=sub)
        for sub in _expr_children(e.orelse):
            yield replace(e, orelse=sub)
    elif isinstance(e, A.Sel):
        yield e.body
        for sub in _expr_children(e.body):
            yield replace(e, body=sub)
    elif isinstance(e, (A.Let, A.LetStar)):
        yield e.body
        for i in range(len(e.bindings)):
            yield replace(e, bindings=e.bindings[:i] + e.bindings[i + 1:])
        for sub in _expr_children(e.body):
            yield replace(e, body=sub)
    elif isinstance(e, A.Set):
        yield e.value
        for sub in _expr_children(e.value):
            yield replace(e, value=sub)
    elif isinstance(e, A.Seq):
        yield from e.body
        if len(e.body) > 1:
            for i in range(len(e.body)):
                yield A.Seq(e.body[:i] + e.body[i + 1:], e.loc)
        for i, x in enumerate(e.body):
            for sub in _expr_children(x):
                yield A.Seq(e.body[:i] + (sub,) + e.body[i + 1:], e.loc)


def _candidates(p: A.ChorProgram) -> Iterator[A.ChorProgram]:
    body = p.body
    for i in range(len(body)):
        yield replace(p, body=body[:i] + body[i + 1:])
    for i, t in enumerate(body):
        subs: Iterator[A.ChorExpr]
        if isinstance(t, A.BareExpr):
            subs = _expr_children(t.expr)
            wrap = lambda e, t=t: replace(t, expr=e)  # noqa: E731
        elif isinstance(t, A.Define):
            subs = _expr_children(t.value)
            wrap = lambda e, t=t: replace(t, value=e)  # noqa: E731
        else:
            continue
        for sub in subs:
            yield replace(p, body=body[:i] + (wrap(sub),) + body[i + 1:])


def shrink(p: A.ChorProgram, still_fails: Callable[[A.ChorProgram], bool], max_steps: int = 500) -> A.ChorProgram:
    """Greedy reduction of ``p`` while ``still_fails`` holds."""
    current = p
    for _ in range(max_steps):
        for cand in _candidates(current):
            if still_fails(cand):
                current = cand
                break
        else:
            return current
    return current


def _roundtrips(p: A.ChorProgram) -> bool:
    from .reader import ParseError, print_choreography, read_choreography

    try:
        return read_choreography(print_choreography(p)) == p
    except ParseError:
        return False


def _projectable(p: A.ChorProgram) -> bool:
    with faults_suspended():
        try:
            project_program(p)
        except ProjectError:
            return False
    return True


def shrink_failure(report: DiffReport, builtins: Builtins | None = None) -> DiffReport:
    """Shrink ``report.program`` while it keeps failing at the same stage.

    Runtime and comparison failures are only kept while the candidate is
    projectable by the unmodified projector, so a counterexample found with
    an injected fault stays a legal input.
    """
    if report.ok or report.stage == "oracle":
        return report
    needs_projectable = report.stage in ("run", "compare")

    def still_fails(cand: A.ChorProgram) -> bool:
        if not _roundtrips(cand) or (needs_projectable and not _projectable(cand)):
            return False
        return diff_run(cand, builtins).stage == report.stage

    return diff_run(shrink(report.program, still_fails), builtins)


# ---------------------------------------------------------------------------
# Random network programs (for merge algebra)
# ---------------------------------------------------------------------------

NET_PEERS = ("A", "B", "C")
NET_LABELS = ("l", "m", "r", "s")


def gen_network(rng: random.Random, depth: int = 3, peers=NET_PEERS, labels=NET_LABELS) -> A.NetProgram:
    """A random network program over small pools, so equal leaves are common."""
    if depth <= 0 or rng.random() < 0.25:
        k = rng.randrange(4)
        if k == 0:
            return A.Local(A.Lit(rng.choice((1, 2, "Left", "Right"))))
        if k == 1:
            return A.Void()
        if k == 2:
            return A.Send(rng.choice(peers), rng.choice((A.Var("x"), A.Lit(1))))
        return A.Recv(rng.choice(peers))
    d = depth - 1
    k = rng.randrange(7)
    if k == 0:
        return A.Choose(rng.choice(peers), rng.choice(labels), gen_network(rng, d, peers, labels))
    if k in (1, 2):
        chosen = rng.sample(labels, rng.randint(1, 3))
        return A.Branch(rng.choice(peers), tuple((lab, gen_network(rng, d, peers, labels)) for lab in chosen))
    if k == 3:
        guard = rng.choice((A.Var("x"), A.Var("y")))
        return A.NIf(guard, gen_network(rng, d, peers, labels), gen_network(rng, d, peers, labels))
    if k == 4:
        return A.NSeq(tuple(gen_network(rng, d, peers, labels) for _ in range(rng.randint(1, 3))))
    if k == 5:
        binds = tuple((rng.choice(("a", A.WILDCARD)), gen_network(rng, d, peers, labels)) for _ in range(rng.randint(1, 2)))
        return A.NLet(binds, gen_network(rng, d, peers, labels))
    cls = rng.choice((A.NDefine, A.NSet))
    return cls(rng.choice(("a", "b")), gen_network(rng, d, peers, labels))


def vary_network(n: A.NetProgram, rng: random.Random, p_break: float = 0.03, labels=NET_LABELS) -> A.NetProgram:
    """A sibling of ``n`` that usually still merges with it.

    Branch arm sets are perturbed (arms dropped, added or varied); with
    probability ``p_break`` a node is replaced outright, which usually makes
    the pair unmergeable.
    """
    if rng.random() < p_break:
        return gen_network(rng, 2, labels=labels)
    if isinstance(n, A.Branch):
        arms = [(lab, vary_network(body, rng, p_break, labels)) for lab, body in n.arms if rng.random() < 0.7]
        present = {lab for lab, _ in arms}
        for lab in labels:
            if lab not in present and rng.random() < 0.3:
                arms.append((lab, gen_network(rng, 1, labels=labels)))
        if not arms:
            arms = [n.arms[0]]
        return A.Branch(n.peer, tuple(arms))
    if isinstance(n, A.Choose):
        return A.Choose(n.peer, n.label, vary_network(n.cont, rng, p_break, labels))
    if isinstance(n, A.NIf):
        return A.NIf(n.guard, vary_network(n.then, rng, p_break, labels), vary_network(n.orelse, rng, p_break, labels))
    if isinstance(n, A.NSeq):
        return A.NSeq(tuple(vary_network(x, rng, p_break, labels) for x in n.body))
    if isinstance(n, A.NLet):
        binds = tuple((x, vary_network(v, rng, p_break, labels)) for x, v in n.bindings)
        return A.NLet(binds, vary_network(n.body, rng, p_break, labels))
    if isinstance(n, (A.NDefine, A.NSet)):
        return type(n)(n.name, vary_network(n.value, rng, p_break, labels))
    return n
