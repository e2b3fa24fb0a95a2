import pytest
from hypothesis import given, settings

from choreo import ast as A
from choreo.oracle import GenConfig, gen_choreography
from choreo.reader import (
    Atom,
    ParseError,
    SList,
    iter_locs,
    parse_network,
    parse_sexpr,
    print_choreography,
    print_network,
    read_choreography,
    read_network,
)

from .conftest import FIXTURES
from .strategies import net_programs


def test_sexpr_simple_list():
    (form,) = parse_sexpr("(chor (A B))")
    assert form == SList((Atom("ident", "chor"), SList((Atom("ident", "A"), Atom("ident", "B")))))


def test_sexpr_quoted_symbol():
    (form,) = parse_sexpr("(sel~> B ([S 'buy]) x)")
    pairs = form.items[2]
    assert pairs.items[0].items[1] == Atom("symbol", "buy")
    assert pairs.items[0].square


def test_sexpr_comments_and_literals():
    forms = parse_sexpr('; header\n(f 1 -2 #t #f "a\\"b") ; trailing\n')
    (form,) = forms
    assert [a.value for a in form.items[1:]] == [1, -2, True, False, 'a"b']


def test_sexpr_locations():
    (form,) = parse_sexpr("(a\n  (b c))")
    assert form.loc == A.Loc(1, 1)
    assert form.items[1].loc == A.Loc(2, 3)
    assert form.items[1].items[1].loc == A.Loc(2, 6)


@pytest.mark.parametrize(
    "text",
    ["(foo", '(foo "bar', "(a))", "(a]", "'", "'(a)", "#q", '"\\q"'],
)
def test_sexpr_errors_point_inside_input(text):
    with pytest.raises(ParseError) as info:
        parse_sexpr(text)
    loc = info.value.loc
    lines = text.split("\n")
    assert 1 <= loc.line <= len(lines)
    assert 1 <= loc.col <= max(1, len(lines[loc.line - 1]))


def test_unclosed_error_at_end():
    with pytest.raises(ParseError) as info:
        parse_sexpr("(foo")
    assert info.value.loc == A.Loc(1, 4)


def test_locations_monotone_in_bookseller():
    forms = parse_sexpr((FIXTURES / "bookseller.chor").read_text())
    locs = [(l.line, l.col) for l in iter_locs(forms)]
    assert locs == sorted(locs)


def test_parse_bookseller(bookseller):
    assert bookseller.processes == ("S", "B")
    kinds = [type(t) for t in bookseller.body]
    assert kinds == [A.DefineComm, A.DefineComm, A.BareExpr]
    assert isinstance(bookseller.body[2].expr, A.If)
    then = bookseller.body[2].expr.then
    assert then.pairs == (("buy", "S"),)


@pytest.mark.parametrize(
    "text, message",
    [
        ("(chor (A A) (at A 1))", "duplicate process"),
        ("(chor (A B) (~> (at A 1) A))", "source and target"),
        ("(chor (A B) (at C 1))", "not declared"),
        ("(chor (A B) (sel~> A ([A 'l]) (at A 1)))", "selects to itself"),
        ("(chor (A B C) (sel~> A ([B 'l] [B 'r]) (at A 1)))", "selected to twice"),
        ("(chor (A B) (define/<~ (at A x) (at A 1)))", "source and target"),
        ("(chor (A B) (frob A))", "unknown choreography form"),
        ("(chor (A B) (if (at A #t) (at A 1)))", "malformed if"),
        ("(chor (A) (at A))", "malformed at"),
        ("(chor (A) (at A (send 1)))", "not allowed inside a local expression"),
        ("(chor (A B) (let ([x (at A 1)])))", "malformed let"),
        ("(chor ())", "at least one process"),
        ("(chor (A)) (chor (B))", "exactly one chor"),
        ("(foo)", "expected a chor program"),
    ],
)
def test_choreography_errors(text, message):
    with pytest.raises(ParseError, match=message):
        read_choreography(text)


def test_sel_pair_spellings_agree():
    canonical = read_choreography("(chor (A B) (sel~> A ([B 'l]) (at B 1)))")
    assert read_choreography("(chor (A B) (sel~> A (['l B]) (at B 1)))") == canonical
    assert read_choreography("(chor (A B) (sel~> A ([l B]) (at B 1)))") == canonical
    assert read_choreography("(chor (A B) (sel~> A [B l] (at B 1)))") == canonical


def test_network_branch():
    n = read_network('(branch?~> A ([l "Left"] [r "Right"]))')
    assert n == A.Branch("A", (("l", A.Local(A.Lit("Left"))), ("r", A.Local(A.Lit("Right")))))


def test_network_recv():
    assert read_network("(recv P)") == A.Recv("P")


def test_network_duplicate_label():
    with pytest.raises(ParseError, match="duplicate branch label"):
        read_network("(branch?~> A ([l 1] [l 2]))")


def test_network_forms():
    n = read_network("(seq (define x (recv A)) (let ([_ (void)] [y 2]) (set! x y)) (choose~> A go (send A x)) (if x 1 2))")
    assert n == A.NSeq(
        (
            A.NDefine("x", A.Recv("A")),
            A.NLet((("_", A.Void()), ("y", A.Local(A.Lit(2)))), A.NSet("x", A.Local(A.Var("y")))),
            A.Choose("A", "go", A.Send("A", A.Var("x"))),
            A.NIf(A.Var("x"), A.Local(A.Lit(1)), A.Local(A.Lit(2))),
        )
    )


def test_network_exactly_one_form():
    with pytest.raises(ParseError):
        parse_network(parse_sexpr("(recv A) (recv B)"))


def test_print_recv():
    assert print_network(A.Recv("P")) == "(recv P)"


def test_print_merged_branch_round_trip():
    text = '(branch?~> A ([l "Left"] [r "Right"]))'
    n = read_network(text)
    assert print_network(n) == text
    assert read_network(print_network(n)) == n


@pytest.mark.parametrize("name", ["bookseller.chor", "merge_example.chor", "merge_example_nosel.chor", "unit.chor"])
def test_fixture_round_trip(name):
    p = read_choreography((FIXTURES / name).read_text())
    assert read_choreography(print_choreography(p)) == p


def test_seq_of_one_round_trips():
    p = A.ChorProgram(("A",), (A.BareExpr(A.Sel("A", (), A.Seq((A.At("A", (A.Lit(1),)),)))),))
    assert read_choreography(print_choreography(p)) == p


@settings(max_examples=300)
@given(net_programs)
def test_network_round_trip(n):
    assert read_network(print_network(n)) == n


def test_generated_choreographies_round_trip():
    for seed in range(200):
        p = gen_choreography(GenConfig(seed=seed, max_depth=4, max_processes=4))
        assert read_choreography(print_choreography(p)) == p


def test_narrow_printing_still_round_trips(bookseller):
    from choreo.projector import project_program

    for prog in project_program(bookseller).values():
        assert read_network(print_network(prog, width=20)) == prog
