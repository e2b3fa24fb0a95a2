"""S-expression reader and printer for choreographies and network programs."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from . import ast as A
from .ast import Loc


class ParseError(Exception):
    """Malformed source text, with the location it was detected at."""

    def __init__(self, message: str, loc: Loc, hint: str | None = None) -> None:
        self.message = message
        self.loc = loc
        self.hint = hint
        text = f"{loc}: {message}"
        if hint:
            text += f" (expected {hint})"
        super().__init__(text)


# ---------------------------------------------------------------------------
# S-expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    kind: str  # "ident" | "int" | "bool" | "string" | "symbol"
    value: object
    loc: Loc = field(default=A.NOLOC, compare=False)

    def is_ident(self, name: str | None = None) -> bool:
        return self.kind == "ident" and (name is None or self.value == name)


@dataclass(frozen=True)
class SList:
    items: tuple[SExpr, ...]
    loc: Loc = field(default=A.NOLOC, compare=False)
    square: bool = field(default=False, compare=False)

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom) and self.items[0].kind == "ident":
            return self.items[0].value
        return None


SExpr = Union[Atom, SList]

_INT_RE = re.compile(r"[+-]?\d+\Z")
_DELIMS = set("()[]\";'")
_CLOSERS = {"(": ")", "[": "]"}
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def loc(self) -> Loc:
        return Loc(self.line, self.col)

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.i]
        self.i += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_blank(self) -> None:
        while self.i < len(self.text):
            ch = self.text[self.i]
            if ch == ";":
                while self.i < len(self.text) and self.text[self.i] != "\n":
                    self.advance()
            elif ch.isspace():
                self.advance()
            else:
                return

    def end_loc(self) -> Loc:
        # Location of the last character, so it stays inside the input.
        if not self.text:
            return Loc(1, 1)
        line = self.text.count("\n", 0, len(self.text) - 1) + 1
        start = self.text.rfind("\n", 0, len(self.text) - 1) + 1
        return Loc(line, len(self.text) - start)

    def read(self) -> SExpr:
        self.skip_blank()
        start = self.loc()
        ch = self.peek()
        if ch == "":
            raise ParseError("unexpected end of input", self.end_loc(), "an expression")
        if ch in _CLOSERS:
            self.advance()
            items = []
            while True:
                self.skip_blank()
                nxt = self.peek()
                if nxt == "":
                    raise ParseError(f"unclosed '{ch}' opened at {start}", self.end_loc(), f"'{_CLOSERS[ch]}'")
                if nxt in ")]":
                    if nxt != _CLOSERS[ch]:
                        raise ParseError(f"'{nxt}' does not match '{ch}' opened at {start}", self.loc(), f"'{_CLOSERS[ch]}'")
                    self.advance()
                    return SList(tuple(items), start, square=(ch == "["))
                items.append(self.read())
        if ch in ")]":
            raise ParseError(f"unbalanced '{ch}'", start)
        if ch == '"':
            return self._read_string(start)
        if ch == "'":
            self.advance()
            tok = self._token()
            if not tok:
                raise ParseError("quote must be followed by a symbol name", start, "'name")
            if tok.startswith("#") or _INT_RE.match(tok):
                raise ParseError(f"cannot quote {tok!r}", start, "'name")
            return Atom("symbol", tok, start)
        tok = self._token()
        if _INT_RE.match(tok):
            return Atom("int", int(tok), start)
        if tok in ("#t", "#true"):
            return Atom("bool", True, start)
        if tok in ("#f", "#false"):
            return Atom("bool", False, start)
        if tok.startswith("#"):
            raise ParseError(f"unknown literal {tok!r}", start)
        return Atom("ident", tok, start)

    def _token(self) -> str:
        begin = self.i
        while self.i < len(self.text) and not self.text[self.i].isspace() and self.text[self.i] not in _DELIMS:
            self.advance()
        return self.text[begin:self.i]

    def _read_string(self, start: Loc) -> Atom:
        self.advance()
        out = []
        while True:
            ch = self.peek()
            if ch == "":
                raise ParseError(f"unterminated string starting at {start}", self.end_loc(), '\'"\'')
            self.advance()
            if ch == '"':
                return Atom("string", "".join(out), start)
            if ch == "\\":
                esc = self.peek()
                if esc not in _ESCAPES:
                    raise ParseError(f"bad escape '\\{esc}'", self.loc())
                self.advance()
                out.append(_ESCAPES[esc])
            else:
                out.append(ch)


def parse_sexpr(text: str) -> list[SExpr]:
    """Read every top-level s-expression in ``text``."""
    sc = _Scanner(text)
    forms = []
    while True:
        sc.skip_blank()
        if sc.peek() == "":
            return forms
        forms.append(sc.read())


# ---------------------------------------------------------------------------
# Local expressions
# ---------------------------------------------------------------------------

RESERVED = frozenset(
    "chor at ~> define/<~ define sel~> if let let* set! send recv choose~> branch?~> seq block".split()
)


def _ident(s: SExpr, what: str) -> str:
    if not (isinstance(s, Atom) and s.kind == "ident"):
        raise ParseError(f"expected {what}", s.loc, what)
    if s.value in RESERVED:
        raise ParseError(f"keyword {s.value!r} cannot be used as {what}", s.loc, what)
    return s.value


def parse_local(s: SExpr) -> A.LocalExpr:
    if isinstance(s, Atom):
        if s.kind == "ident":
            return A.Var(_ident(s, "a variable"), s.loc)
        if s.kind == "symbol":
            return A.Lit(A.Symbol(s.value), s.loc)
        return A.Lit(s.value, s.loc)
    head = s.head()
    if head is None:
        raise ParseError("expected a local expression", s.loc, "(builtin arg ...)")
    if head == "block":
        if len(s.items) < 2:
            raise ParseError("empty block", s.loc, "(block e e ...)")
        return A.Block(tuple(parse_local(x) for x in s.items[1:]), s.loc)
    if head in RESERVED:
        raise ParseError(f"{head!r} is not allowed inside a local expression", s.loc, "a builtin application")
    return A.Call(head, tuple(parse_local(x) for x in s.items[1:]), s.loc)


# ---------------------------------------------------------------------------
# Choreographies
# ---------------------------------------------------------------------------


class _ChorParser:
    def __init__(self, processes: Sequence[str]) -> None:
        self.processes = tuple(processes)

    def process(self, s: SExpr) -> str:
        name = _ident(s, "a process name")
        if name not in self.processes:
            raise ParseError(f"process {name!r} is not declared in the chor header", s.loc)
        return name

    def binding(self, s: SExpr) -> A.Binding:
        if isinstance(s, Atom):
            return A.GlobalBinding(_ident(s, "a binding name"))
        return self.located(s)

    def located(self, s: SExpr) -> A.LocatedBinding:
        if not (isinstance(s, SList) and s.head() == "at" and len(s.items) == 3):
            raise ParseError("malformed located binding", s.loc, "(at P x)")
        return A.LocatedBinding(self.process(s.items[1]), _ident(s.items[2], "a variable"))

    def located_expr(self, s: SExpr) -> tuple[str, A.LocalExpr]:
        if not (isinstance(s, SList) and s.head() == "at" and len(s.items) == 3):
            raise ParseError("malformed located expression", s.loc, "(at P e)")
        return self.process(s.items[1]), parse_local(s.items[2])

    def body(self, forms: Sequence[SExpr], at: SExpr) -> A.ChorExpr:
        if not forms:
            raise ParseError("missing body", at.loc, "at least one expression")
        if len(forms) == 1:
            return self.body_item(forms[0])
        return A.Seq(tuple(self.body_item(f) for f in forms), forms[0].loc)

    def body_item(self, s: SExpr) -> A.ChorExpr:
        t = self.term(s)
        return t.expr if isinstance(t, A.BareExpr) else t

    def expr(self, s: SExpr) -> A.ChorExpr:
        if not isinstance(s, SList) or s.head() is None:
            raise ParseError("expected a choreography expression", s.loc, "(at P e) or another choreography form")
        head, args = s.head(), s.items[1:]
        if head == "at":
            if len(args) < 2:
                raise ParseError("malformed at", s.loc, "(at P e ...)")
            return A.At(self.process(args[0]), tuple(parse_local(x) for x in args[1:]), s.loc)
        if head == "~>":
            if len(args) != 2:
                raise ParseError("malformed communication", s.loc, "(~> (at P e) Q)")
            src, e = self.located_expr(args[0])
            dst = self.process(args[1])
            if src == dst:
                raise ParseError(f"communication source and target are both {src!r}", s.loc, "distinct processes")
            return A.Comm(src, e, dst, s.loc)
        if head == "if":
            if len(args) != 3:
                raise ParseError("malformed if", s.loc, "(if (at P e) E1 E2)")
            p, g = self.located_expr(args[0])
            return A.If(p, g, self.expr(args[1]), self.expr(args[2]), s.loc)
        if head == "sel~>":
            return self.sel(s, args)
        if head in ("let", "let*"):
            if len(args) < 2 or not isinstance(args[0], SList):
                raise ParseError(f"malformed {head}", s.loc, f"({head} ([B E] ...) E ...)")
            binds = []
            for b in args[0].items:
                if not (isinstance(b, SList) and len(b.items) == 2):
                    raise ParseError("malformed let binding", b.loc, "[B E]")
                binds.append((self.binding(b.items[0]), self.expr(b.items[1])))
            cls = A.Let if head == "let" else A.LetStar
            return cls(tuple(binds), self.body(args[1:], s), s.loc)
        if head == "set!":
            if len(args) != 2:
                raise ParseError("malformed set!", s.loc, "(set! (at P x) E)")
            return A.Set(self.located(args[0]), self.expr(args[1]), s.loc)
        if head == "seq":
            return A.Seq(tuple(self.body_item(x) for x in args), s.loc) if args else self.body(args, s)
        if head in ("define", "define/<~"):
            raise ParseError(f"{head} is only allowed at top level or in a body", s.loc, "an expression")
        raise ParseError(f"unknown choreography form {head!r}", s.loc, "at, ~>, if, sel~>, let, let*, set! or seq")

    def sel(self, s: SList, args: Sequence[SExpr]) -> A.Sel:
        if len(args) < 3 or not isinstance(args[1], SList):
            raise ParseError("malformed selection", s.loc, "(sel~> P ([Q 'l] ...) E ...)")
        chooser = self.process(args[0])
        spec = args[1]
        # (sel~> A [B l] E) is accepted as shorthand for one pair.
        raw = [spec] if spec.items and isinstance(spec.items[0], Atom) else list(spec.items)
        pairs = [self.sel_pair(p) for p in raw]
        seen = set()
        for label, q in pairs:
            if q == chooser:
                raise ParseError(f"{chooser!r} selects to itself", spec.loc, "targets other than the chooser")
            if q in seen:
                raise ParseError(f"{q!r} is selected to twice", spec.loc, "distinct selection targets")
            seen.add(q)
        return A.Sel(chooser, tuple(pairs), self.body(args[2:], s), s.loc)

    def sel_pair(self, p: SExpr) -> tuple[str, str]:
        if not (isinstance(p, SList) and len(p.items) == 2 and all(isinstance(x, Atom) for x in p.items)):
            raise ParseError("malformed selection pair", p.loc, "[Q 'label]")
        a, b = p.items
        if a.kind == "symbol" and b.kind == "ident":
            return a.value, self.process(b)
        if b.kind == "symbol" and a.kind == "ident":
            return b.value, self.process(a)
        if a.kind == b.kind == "ident":
            a_proc, b_proc = a.value in self.processes, b.value in self.processes
            if a_proc and not b_proc:
                return b.value, a.value
            if b_proc and not a_proc:
                return a.value, b.value
            raise ParseError("cannot tell label from process in selection pair", p.loc, "[Q 'label]")
        raise ParseError("malformed selection pair", p.loc, "[Q 'label]")

    def term(self, s: SExpr) -> A.ChorTerm:
        head = s.head() if isinstance(s, SList) else None
        if head == "define":
            if len(s.items) != 3:
                raise ParseError("malformed define", s.loc, "(define B E)")
            return A.Define(self.binding(s.items[1]), self.expr(s.items[2]), s.loc)
        if head == "define/<~":
            if len(s.items) != 3:
                raise ParseError("malformed define/<~", s.loc, "(define/<~ (at P x) (at Q e))")
            tgt = self.located(s.items[1])
            src, e = self.located_expr(s.items[2])
            if src == tgt.process:
                raise ParseError(f"define/<~ source and target are both {src!r}", s.loc, "distinct processes")
            return A.DefineComm(tgt.process, tgt.name, src, e, s.loc)
        return A.BareExpr(self.expr(s), s.loc)


def parse_choreography(forms: Sequence[SExpr]) -> A.ChorProgram:
    if len(forms) != 1:
        loc = forms[1].loc if len(forms) > 1 else Loc(1, 1)
        raise ParseError(f"expected exactly one chor form, found {len(forms)}", loc, "(chor (P ...) T ...)")
    top = forms[0]
    if not (isinstance(top, SList) and top.head() == "chor" and len(top.items) >= 2 and isinstance(top.items[1], SList)):
        raise ParseError("expected a chor program", top.loc, "(chor (P ...) T ...)")
    header = top.items[1]
    procs: list[str] = []
    for item in header.items:
        name = _ident(item, "a process name")
        if name in procs:
            raise ParseError(f"duplicate process {name!r}", item.loc, "distinct process names")
        procs.append(name)
    if not procs:
        raise ParseError("a choreography needs at least one process", header.loc, "(P ...)")
    parser = _ChorParser(procs)
    return A.ChorProgram(tuple(procs), tuple(parser.term(t) for t in top.items[2:]), top.loc)


def read_choreography(text: str) -> A.ChorProgram:
    return parse_choreography(parse_sexpr(text))


# ---------------------------------------------------------------------------
# Network programs
# ---------------------------------------------------------------------------


def _label(s: SExpr) -> str:
    if isinstance(s, Atom) and s.kind in ("ident", "symbol"):
        return s.value
    raise ParseError("expected a label", s.loc, "label")


def _net_body(forms: Sequence[SExpr], at: SExpr) -> A.NetProgram:
    if not forms:
        raise ParseError("missing body", at.loc, "a network program")
    if len(forms) == 1:
        return _net(forms[0])
    return A.NSeq(tuple(_net(f) for f in forms))


def _binder(s: SExpr) -> str:
    if isinstance(s, Atom) and s.value == A.WILDCARD:
        return A.WILDCARD
    return _ident(s, "a variable")


def _net(s: SExpr) -> A.NetProgram:
    if isinstance(s, Atom):
        return A.Local(parse_local(s))
    head, args = s.head(), s.items[1:]
    if head == "void" and not args:
        return A.Void()
    if head == "send":
        if len(args) != 2:
            raise ParseError("malformed send", s.loc, "(send P e)")
        return A.Send(_ident(args[0], "a process name"), parse_local(args[1]))
    if head == "recv":
        if len(args) != 1:
            raise ParseError("malformed recv", s.loc, "(recv P)")
        return A.Recv(_ident(args[0], "a process name"))
    if head == "choose~>":
        if len(args) != 3:
            raise ParseError("malformed choose~>", s.loc, "(choose~> P l N)")
        return A.Choose(_ident(args[0], "a process name"), _label(args[1]), _net(args[2]))
    if head == "branch?~>":
        if len(args) != 2 or not isinstance(args[1], SList) or not args[1].items:
            raise ParseError("malformed branch?~>", s.loc, "(branch?~> P ([l N] ...))")
        arms = []
        for arm in args[1].items:
            if not (isinstance(arm, SList) and len(arm.items) >= 2):
                raise ParseError("malformed branch arm", arm.loc, "[l N]")
            label = _label(arm.items[0])
            if any(label == seen for seen, _ in arms):
                raise ParseError(f"duplicate branch label {label!r}", arm.loc, "distinct labels")
            arms.append((label, _net_body(arm.items[1:], arm)))
        return A.Branch(_ident(args[0], "a process name"), tuple(arms))
    if head == "if":
        if len(args) != 3:
            raise ParseError("malformed if", s.loc, "(if e N1 N2)")
        return A.NIf(parse_local(args[0]), _net(args[1]), _net(args[2]))
    if head == "let":
        if len(args) < 2 or not isinstance(args[0], SList):
            raise ParseError("malformed let", s.loc, "(let ([x N] ...) N)")
        binds = []
        for b in args[0].items:
            if not (isinstance(b, SList) and len(b.items) == 2):
                raise ParseError("malformed let binding", b.loc, "[x N]")
            binds.append((_binder(b.items[0]), _net(b.items[1])))
        return A.NLet(tuple(binds), _net_body(args[1:], s))
    if head == "define":
        if len(args) != 2:
            raise ParseError("malformed define", s.loc, "(define x N)")
        return A.NDefine(_binder(args[0]), _net(args[1]))
    if head == "set!":
        if len(args) != 2:
            raise ParseError("malformed set!", s.loc, "(set! x N)")
        return A.NSet(_ident(args[0], "a variable"), _net(args[1]))
    if head == "seq":
        return A.NSeq(tuple(_net(x) for x in args)) if args else _net_body(args, s)
    return A.Local(parse_local(s))


def parse_network(forms: Sequence[SExpr]) -> A.NetProgram:
    if len(forms) != 1:
        loc = forms[1].loc if len(forms) > 1 else Loc(1, 1)
        raise ParseError(f"expected exactly one network form, found {len(forms)}", loc, "a network program")
    return _net(forms[0])


def read_network(text: str) -> A.NetProgram:
    return parse_network(parse_sexpr(text))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _id(name: str) -> Atom:
    return Atom("ident", name)


def _sl(*items: SExpr, square: bool = False) -> SList:
    return SList(tuple(items), square=square)


def local_to_sexpr(e: A.LocalExpr) -> SExpr:
    if isinstance(e, A.Lit):
        v = e.value
        if isinstance(v, A.Symbol):
            return Atom("symbol", v.name)
        if isinstance(v, bool):
            return Atom("bool", v)
        if isinstance(v, int):
            return Atom("int", v)
        return Atom("string", v)
    if isinstance(e, A.Var):
        return _id(e.name)
    if isinstance(e, A.Call):
        return _sl(_id(e.op), *map(local_to_sexpr, e.args))
    if isinstance(e, A.Block):
        return _sl(_id("block"), *map(local_to_sexpr, e.body))
    raise TypeError(f"not a local expression: {e!r}")


def _binding_sexpr(b: A.Binding) -> SExpr:
    if isinstance(b, A.GlobalBinding):
        return _id(b.name)
    return _sl(_id("at"), _id(b.process), _id(b.name))


def _body_sexprs(e: A.ChorExpr) -> list[SExpr]:
    # A multi-form body reads back as Seq, so Seq(>=2) prints spread out.
    if isinstance(e, A.Seq) and len(e.body) >= 2:
        return [chor_to_sexpr(x) for x in e.body]
    return [chor_to_sexpr(e)]


def chor_to_sexpr(e: A.ChorExpr) -> SExpr:
    if isinstance(e, A.At):
        return _sl(_id("at"), _id(e.process), *map(local_to_sexpr, e.exprs))
    if isinstance(e, A.Comm):
        return _sl(_id("~>"), _sl(_id("at"), _id(e.source), local_to_sexpr(e.expr)), _id(e.target))
    if isinstance(e, A.If):
        guard = _sl(_id("at"), _id(e.guard_at), local_to_sexpr(e.guard))
        return _sl(_id("if"), guard, chor_to_sexpr(e.then), chor_to_sexpr(e.orelse))
    if isinstance(e, A.Sel):
        pairs = _sl(*(_sl(_id(q), Atom("symbol", lab), square=True) for lab, q in e.pairs))
        return _sl(_id("sel~>"), _id(e.chooser), pairs, *_body_sexprs(e.body))
    if isinstance(e, (A.Let, A.LetStar)):
        head = "let" if isinstance(e, A.Let) else "let*"
        binds = _sl(*(_sl(_binding_sexpr(b), chor_to_sexpr(v), square=True) for b, v in e.bindings))
        return _sl(_id(head), binds, *_body_sexprs(e.body))
    if isinstance(e, A.Set):
        return _sl(_id("set!"), _binding_sexpr(e.target), chor_to_sexpr(e.value))
    if isinstance(e, A.Seq):
        return _sl(_id("seq"), *map(chor_to_sexpr, e.body))
    if isinstance(e, (A.Define, A.DefineComm)):
        return term_to_sexpr(e)
    raise TypeError(f"not a choreography expression: {e!r}")


def term_to_sexpr(t: A.ChorTerm) -> SExpr:
    if isinstance(t, A.Define):
        return _sl(_id("define"), _binding_sexpr(t.binding), chor_to_sexpr(t.value))
    if isinstance(t, A.DefineComm):
        return _sl(
            _id("define/<~"),
            _sl(_id("at"), _id(t.target), _id(t.name)),
            _sl(_id("at"), _id(t.source), local_to_sexpr(t.expr)),
        )
    if isinstance(t, A.BareExpr):
        return chor_to_sexpr(t.expr)
    raise TypeError(f"not a choreography term: {t!r}")


def program_to_sexpr(p: A.ChorProgram) -> SExpr:
    return _sl(_id("chor"), _sl(*map(_id, p.processes)), *map(term_to_sexpr, p.body))


def net_to_sexpr(n: A.NetProgram) -> SExpr:
    if isinstance(n, A.Local):
        return local_to_sexpr(n.expr)
    if isinstance(n, A.Void):
        return _sl(_id("void"))
    if isinstance(n, A.Send):
        return _sl(_id("send"), _id(n.peer), local_to_sexpr(n.expr))
    if isinstance(n, A.Recv):
        return _sl(_id("recv"), _id(n.peer))
    if isinstance(n, A.Choose):
        return _sl(_id("choose~>"), _id(n.peer), _id(n.label), net_to_sexpr(n.cont))
    if isinstance(n, A.Branch):
        arms = _sl(*(_sl(_id(lab), net_to_sexpr(body), square=True) for lab, body in n.arms))
        return _sl(_id("branch?~>"), _id(n.peer), arms)
    if isinstance(n, A.NIf):
        return _sl(_id("if"), local_to_sexpr(n.guard), net_to_sexpr(n.then), net_to_sexpr(n.orelse))
    if isinstance(n, A.NLet):
        binds = _sl(*(_sl(_id(x), net_to_sexpr(v), square=True) for x, v in n.bindings))
        return _sl(_id("let"), binds, net_to_sexpr(n.body))
    if isinstance(n, A.NDefine):
        return _sl(_id("define"), _id(n.name), net_to_sexpr(n.value))
    if isinstance(n, A.NSet):
        return _sl(_id("set!"), _id(n.name), net_to_sexpr(n.value))
    if isinstance(n, A.NSeq):
        return _sl(_id("seq"), *map(net_to_sexpr, n.body))
    raise TypeError(f"not a network program: {n!r}")


def atom_text(a: Atom) -> str:
    if a.kind == "ident":
        return a.value
    if a.kind == "int":
        return str(a.value)
    if a.kind == "bool":
        return "#t" if a.value else "#f"
    if a.kind == "symbol":
        return f"'{a.value}"
    return A.quote_string(a.value)


def flat(s: SExpr) -> str:
    if isinstance(s, Atom):
        return atom_text(s)
    o, c = ("[", "]") if s.square else ("(", ")")
    return o + " ".join(flat(x) for x in s.items) + c


# Forms whose first non-atom argument stays on the header line.
_HANG = frozenset({"chor", "if", "let", "let*", "sel~>", "branch?~>", "define/<~"})


def pretty(s: SExpr, width: int = 80, indent: int = 0) -> str:
    """Lay out ``s`` on one line when it fits, else one child per line."""
    text = flat(s)
    if isinstance(s, Atom) or indent + len(text) <= width or len(s.items) < 2:
        return text
    o, c = ("[", "]") if s.square else ("(", ")")
    items = list(s.items)
    if not isinstance(items[0], Atom):
        # A data list (bindings, arms, selection pairs): align the elements.
        col = indent + 1
        lines = [pretty(items[0], width, col)] + [" " * col + pretty(x, width, col) for x in items[1:]]
        return o + "\n".join(lines) + c
    lead = [items.pop(0)]
    while items and isinstance(items[0], Atom) and len(lead) < 3:
        lead.append(items.pop(0))
    head = o + " ".join(flat(x) for x in lead)
    if s.head() in _HANG and items:
        head += " " + pretty(items.pop(0), width, indent + len(head) + 1)
    if not items:
        return head + c
    pad = " " * (indent + 2)
    return head + "\n" + "\n".join(pad + pretty(x, width, indent + 2) for x in items) + c


def print_choreography(p: A.ChorProgram) -> str:
    return pretty(program_to_sexpr(p))


def print_network(n: A.NetProgram, width: int = 80) -> str:
    return pretty(net_to_sexpr(n), width)


def print_local(e: A.LocalExpr) -> str:
    return flat(local_to_sexpr(e))


def print_expr(e: A.ChorExpr) -> str:
    return flat(chor_to_sexpr(e))


def iter_locs(forms: Iterable[SExpr]) -> Iterable[Loc]:
    for f in forms:
        yield f.loc
        if isinstance(f, SList):
            yield from iter_locs(f.items)
