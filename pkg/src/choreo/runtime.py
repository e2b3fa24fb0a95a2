"""Concurrent execution of projected network programs.

Each process runs on its own thread.  The only shared object is the
``Transport``: one FIFO mailbox per ordered (sender, receiver) pair.  The
transport also counts how many processes are still able to make progress;
when that count reaches zero while some process is blocked in a receive,
the run is declared deadlocked.  No timeouts are involved.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from . import ast as A
from .ast import VOID, NetProgram, Symbol, Value

Builtins = Mapping[str, Any]


class ChoreoRuntimeError(Exception):
    """A process failed while executing."""

    def __init__(self, message: str, process: str | None = None) -> None:
        self.message = message
        self.process = process
        super().__init__(f"{process}: {message}" if process else message)


class EvalError(ChoreoRuntimeError):
    pass


class DeadlockError(ChoreoRuntimeError):
    def __init__(self, waiting: Mapping[str, str]) -> None:
        self.waiting = dict(waiting)
        desc = ", ".join(f"{p} waits on {q}" for p, q in sorted(self.waiting.items()))
        super().__init__(f"deadlock: {desc}")


@dataclass(frozen=True)
class LabelMsg:
    """A selection label in flight; never confused with a data value."""

    label: str

    def __str__(self) -> str:
        return f"label {self.label}"


Payload = Any  # Value | LabelMsg


def payload_key(p: Payload) -> tuple:
    if isinstance(p, LabelMsg):
        return ("label", p.label)
    return A.value_key(p)


def format_payload(p: Payload) -> str:
    return str(p) if isinstance(p, LabelMsg) else A.format_value(p)


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    payload: Payload

    def __post_init__(self):
        if self.sender == self.receiver:
            raise ValueError(f"{self.sender} cannot message itself")

    def key(self) -> tuple:
        return (self.sender, self.receiver, payload_key(self.payload))


# ---------------------------------------------------------------------------
# Builtins and local evaluation
# ---------------------------------------------------------------------------


def _ints(op: str, args: tuple) -> tuple:
    for v in args:
        if isinstance(v, bool) or not isinstance(v, int):
            raise EvalError(f"{op}: expected integers, got {A.format_value(v)}")
    return args


def _plus(*args):
    return sum(_ints("+", args))


def _minus(*args):
    _ints("-", args)
    if not args:
        raise EvalError("-: expects at least one argument")
    if len(args) == 1:
        return -args[0]
    out = args[0]
    for v in args[1:]:
        out -= v
    return out


def _times(*args):
    out = 1
    for v in _ints("*", args):
        out *= v
    return out


def _compare(op: str, test: Callable[[int, int], bool]):
    def fn(*args):
        _ints(op, args)
        if len(args) < 2:
            raise EvalError(f"{op}: expects at least two arguments")
        return all(test(x, y) for x, y in zip(args, args[1:]))

    return fn


def _eq(*args):
    if len(args) != 2:
        raise EvalError(f"eq?: expects 2 arguments, got {len(args)}")
    return A.values_equal(args[0], args[1])


def _not(*args):
    if len(args) != 1:
        raise EvalError(f"not: expects 1 argument, got {len(args)}")
    return args[0] is False


def _string_append(*args):
    for v in args:
        if not isinstance(v, str):
            raise EvalError(f"string-append: expected strings, got {A.format_value(v)}")
    return "".join(args)


STANDARD_BUILTINS: dict[str, Callable[..., Value]] = {
    "+": _plus,
    "-": _minus,
    "*": _times,
    "<=": _compare("<=", lambda x, y: x <= y),
    "<": _compare("<", lambda x, y: x < y),
    ">=": _compare(">=", lambda x, y: x >= y),
    ">": _compare(">", lambda x, y: x > y),
    "eq?": _eq,
    "not": _not,
    "string-append": _string_append,
    "void": lambda *args: VOID,
}

# Evaluated lazily by eval_local, so they are not in the table.
SPECIAL_FORMS = ("and", "or")


def _check_value(op: str, v: Any) -> Value:
    if v is None:
        return VOID
    if v is VOID or isinstance(v, (int, str, Symbol)):
        return v
    raise EvalError(f"{op} returned a non-value {v!r}")


def eval_local(e: A.LocalExpr, store: Store, builtins: Builtins | None = None) -> Value:
    """Evaluate ``e`` call-by-value, left to right.

    Names are looked up in ``store`` first; non-callable entries of
    ``builtins`` act as read-only constants behind it.
    """
    table = builtins or {}
    if isinstance(e, A.Lit):
        return e.value
    if isinstance(e, A.Var):
        if store.has(e.name):
            return store.lookup(e.name)
        if e.name in table and not callable(table[e.name]):
            return _check_value(e.name, table[e.name])
        raise EvalError(f"unbound variable {e.name!r}")
    if isinstance(e, A.Block):
        out: Value = VOID
        for x in e.body:
            out = eval_local(x, store, builtins)
        return out
    if isinstance(e, A.Call):
        if e.op == "and":
            out = True
            for x in e.args:
                out = eval_local(x, store, builtins)
                if out is False:
                    return False
            return out
        if e.op == "or":
            for x in e.args:
                out = eval_local(x, store, builtins)
                if out is not False:
                    return out
            return False
        fn = table.get(e.op, STANDARD_BUILTINS.get(e.op))
        if fn is None:
            raise EvalError(f"unknown builtin {e.op!r}")
        if not callable(fn):
            raise EvalError(f"{e.op!r} is a constant, not a function")
        args = [eval_local(x, store, builtins) for x in e.args]
        try:
            return _check_value(e.op, fn(*args))
        except EvalError:
            raise
        except Exception as exc:  # host function failure
            raise EvalError(f"{e.op}: {exc}") from exc
    raise TypeError(f"not a local expression: {e!r}")


# ---------------------------------------------------------------------------
# Stores
# ---------------------------------------------------------------------------


class Store:
    """Top-level frame for ``define`` plus a stack of ``let`` frames."""

    def __init__(self, initial: Mapping[str, Value] | None = None) -> None:
        self.top: dict[str, Value] = dict(initial or {})
        self.frames: list[dict[str, Value]] = []

    def has(self, name: str) -> bool:
        return any(name in f for f in self.frames) or name in self.top

    def lookup(self, name: str) -> Value:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        if name in self.top:
            return self.top[name]
        raise EvalError(f"unbound variable {name!r}")

    def define(self, name: str, value: Value) -> None:
        if name != A.WILDCARD:
            self.top[name] = value

    def assign(self, name: str, value: Value) -> None:
        for frame in reversed(self.frames):
            if name in frame:
                frame[name] = value
                return
        if name in self.top:
            self.top[name] = value
            return
        raise EvalError(f"set! of unbound variable {name!r}")

    def push(self, frame: Mapping[str, Value]) -> None:
        self.frames.append({k: v for k, v in frame.items() if k != A.WILDCARD})

    def pop(self) -> None:
        self.frames.pop()

    def snapshot(self) -> dict[str, Value]:
        return dict(self.top)


def merged_table(builtins: Builtins | None, per_process: Mapping[str, Builtins] | None, process: str) -> dict:
    table = dict(builtins or {})
    if per_process and process in per_process:
        table.update(per_process[process])
    return table


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


class Transport:
    """Reliable per-pair FIFO mailboxes with a quiescence watchdog."""

    def __init__(self, processes) -> None:
        procs = list(processes)
        self._cond = threading.Condition()
        self._boxes: dict[tuple[str, str], deque] = {(p, q): deque() for p in procs for q in procs if p != q}
        self.history: dict[tuple[str, str], list[Payload]] = {pair: [] for pair in self._boxes}
        self.trace: list[Message] = []
        self._running = set(procs)
        self._waiting: dict[str, str] = {}
        self.deadlock: dict[str, str] | None = None

    def _box(self, sender: str, receiver: str) -> deque:
        try:
            return self._boxes[(sender, receiver)]
        except KeyError:
            raise ChoreoRuntimeError(f"no channel from {sender} to {receiver}") from None

    def send(self, sender: str, receiver: str, payload: Payload) -> Message:
        msg = Message(sender, receiver, payload)
        with self._cond:
            self._box(sender, receiver).append(payload)
            self.history[(sender, receiver)].append(payload)
            self.trace.append(msg)
            if self._waiting.get(receiver) == sender:
                # Count the receiver as live before we could possibly finish.
                del self._waiting[receiver]
                self._running.add(receiver)
                self._cond.notify_all()
        return msg

    def recv(self, receiver: str, sender: str) -> Payload:
        with self._cond:
            box = self._box(sender, receiver)
            while not box:
                if self.deadlock is not None:
                    raise DeadlockError(self.deadlock)
                if receiver not in self._waiting:
                    self._running.discard(receiver)
                    self._waiting[receiver] = sender
                    self._check_quiescent()
                    continue
                self._cond.wait()
            return box.popleft()

    def finish(self, process: str) -> None:
        with self._cond:
            self._running.discard(process)
            self._waiting.pop(process, None)
            self._check_quiescent()

    def _check_quiescent(self) -> None:
        if not self._running and self._waiting and self.deadlock is None:
            self.deadlock = dict(self._waiting)
            self._cond.notify_all()

    def pending(self) -> dict[tuple[str, str], int]:
        with self._cond:
            return {pair: len(box) for pair, box in self._boxes.items() if box}


# ---------------------------------------------------------------------------
# Process execution
# ---------------------------------------------------------------------------


class _Process:
    def __init__(self, name: str, transport: Transport, builtins: Builtins, initial=None) -> None:
        self.name = name
        self.transport = transport
        self.builtins = builtins
        self.store = Store(initial)
        self.log: list[Message] = []

    def send(self, peer: str, payload: Payload) -> None:
        if peer == self.name:
            raise ChoreoRuntimeError("send to self", self.name)
        self.log.append(self.transport.send(self.name, peer, payload))

    def recv(self, peer: str) -> Payload:
        if peer == self.name:
            raise ChoreoRuntimeError("receive from self", self.name)
        return self.transport.recv(self.name, peer)

    def run(self, n: NetProgram) -> Value:
        if isinstance(n, A.Local):
            return eval_local(n.expr, self.store, self.builtins)
        if isinstance(n, A.Void):
            return VOID
        if isinstance(n, A.Send):
            self.send(n.peer, eval_local(n.expr, self.store, self.builtins))
            return VOID
        if isinstance(n, A.Recv):
            got = self.recv(n.peer)
            if isinstance(got, LabelMsg):
                raise ChoreoRuntimeError(f"expected a value from {n.peer}, received {got}")
            return got
        if isinstance(n, A.Choose):
            self.send(n.peer, LabelMsg(n.label))
            return self.run(n.cont)
        if isinstance(n, A.Branch):
            got = self.recv(n.peer)
            if not isinstance(got, LabelMsg):
                raise ChoreoRuntimeError(f"expected a label from {n.peer}, received {A.format_value(got)}")
            arm = n.arm(got.label)
            if arm is None:
                raise ChoreoRuntimeError(f"unexpected label {got.label!r} from {n.peer}")
            return self.run(arm)
        if isinstance(n, A.NIf):
            guard = eval_local(n.guard, self.store, self.builtins)
            return self.run(n.then if guard is not False else n.orelse)
        if isinstance(n, A.NLet):
            values = {}
            for x, v in n.bindings:
                values[x] = self.run(v)
            self.store.push(values)
            try:
                return self.run(n.body)
            finally:
                self.store.pop()
        if isinstance(n, A.NDefine):
            self.store.define(n.name, self.run(n.value))
            return VOID
        if isinstance(n, A.NSet):
            self.store.assign(n.name, self.run(n.value))
            return VOID
        if isinstance(n, A.NSeq):
            out: Value = VOID
            for sub in n.body:
                out = self.run(sub)
            return out
        raise TypeError(f"not a network program: {n!r}")


def run_process(
    a: str,
    n: NetProgram,
    transport: Transport,
    builtins: Builtins | None = None,
    initial: Mapping[str, Value] | None = None,
) -> tuple[Store, Value, list[Message]]:
    """Run one process to completion on the calling thread."""
    proc = _Process(a, transport, dict(builtins or {}), initial)
    try:
        value = proc.run(n)
    except ChoreoRuntimeError as err:
        if err.process is None:
            err.process = a
            err.args = (f"{a}: {err.message}",)
        raise
    finally:
        transport.finish(a)
    return proc.store, value, proc.log


@dataclass
class RunResult:
    stores: dict[str, dict[str, Value]]
    values: dict[str, Value]
    logs: dict[str, list[Message]]
    history: dict[tuple[str, str], list[Payload]] = field(default_factory=dict)
    # Global send order depends on scheduling, so it is not part of equality.
    trace: list[Message] = field(default_factory=list, compare=False)

    def key(self) -> tuple:
        """Exact comparison key; distinguishes ``#t`` from ``1``."""
        return (
            sorted((p, sorted((k, A.value_key(v)) for k, v in s.items())) for p, s in self.stores.items()),
            sorted((p, A.value_key(v)) for p, v in self.values.items()),
            sorted((p, [m.key() for m in log]) for p, log in self.logs.items()),
        )


def run_network(
    programs: Mapping[str, NetProgram],
    builtins: Builtins | None = None,
    *,
    per_process: Mapping[str, Builtins] | None = None,
    initial: Mapping[str, Mapping[str, Value]] | None = None,
) -> RunResult:
    """Run every program on its own thread and wait for all of them.

    Raises the first per-process error (in declaration order) if any process
    failed, otherwise ``DeadlockError`` if the watchdog fired.
    """
    transport = Transport(programs)
    outcomes: dict[str, tuple] = {}
    errors: dict[str, BaseException] = {}

    def unit(name: str, prog: NetProgram) -> None:
        try:
            outcomes[name] = run_process(
                name,
                prog,
                transport,
                merged_table(builtins, per_process, name),
                (initial or {}).get(name),
            )
        except BaseException as exc:  # reported by the launching thread
            errors[name] = exc

    threads = [threading.Thread(target=unit, args=(p, n), name=f"proc-{p}", daemon=True) for p, n in programs.items()]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    for name in programs:
        err = errors.get(name)
        if err is not None and not isinstance(err, DeadlockError):
            raise err
    if transport.deadlock is not None or errors:
        raise DeadlockError(transport.deadlock or {})

    return RunResult(
        stores={p: outcomes[p][0].snapshot() for p in programs},
        values={p: outcomes[p][1] for p in programs},
        logs={p: outcomes[p][2] for p in programs},
        history={pair: list(h) for pair, h in transport.history.items()},
        trace=list(transport.trace),
    )
