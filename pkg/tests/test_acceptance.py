"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line."""

import random

import pytest

from choreo import ast as A
from choreo.cli import main
from choreo.fixtures import SHIP_DATE
from choreo.oracle import diff_run, gen_network, generate, vary_network
from choreo.projector import LOCAL_EXPR_MISMATCH, MergeError, ProjectError, merge, project_program, project_term
from choreo.reader import print_choreography, print_network, read_choreography, read_network
from choreo.runtime import DeadlockError, format_payload, run_network

from .clauses import CLAUSES
from .conftest import FIXTURES, load

GENERATED_SEED = 42
GENERATED_COUNT = 1000


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nacceptance {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def generated():
    return list(generate(GENERATED_SEED, GENERATED_COUNT, max_depth=5, max_processes=4))


# Communication actions along each execution path of a network program.
def _paths(n):
    if isinstance(n, A.Send):
        return [[("send", n.peer)]]
    if isinstance(n, A.Recv):
        return [[("recv", n.peer)]]
    if isinstance(n, A.Choose):
        return [[("choose", n.peer, n.label)] + rest for rest in _paths(n.cont)]
    if isinstance(n, A.Branch):
        return [[("branch", n.peer, lab)] + rest for lab, body in n.arms for rest in _paths(body)]
    if isinstance(n, A.NIf):
        return _paths(n.then) + _paths(n.orelse)
    if isinstance(n, (A.NDefine, A.NSet)):
        return _paths(n.value)
    if isinstance(n, A.NLet):
        return _seq_paths([v for _, v in n.bindings] + [n.body])
    if isinstance(n, A.NSeq):
        return _seq_paths(list(n.body))
    return [[]]


def _seq_paths(parts):
    out = [[]]
    for part in parts:
        out = [a + b for a in out for b in _paths(part)]
    return out


def _dual(mine, theirs):
    kinds = {("send", "recv"), ("recv", "send"), ("choose", "branch"), ("branch", "choose")}
    if (mine[0], theirs[0]) not in kinds:
        return False
    return mine[0] in ("send", "recv") or mine[2] == theirs[2]


def test_criterion_1_bookseller_end_to_end(capsys, bookseller, budget20, budget5):
    problems = []
    if main(["check", str(FIXTURES / "bookseller.chor")]) != 0:
        problems.append("check did not exit 0")
    progs = project_program(bookseller)
    buyer_paths = {p[2][2]: p for p in _paths(progs["B"])}
    seller_paths = {p[2][2]: p for p in _paths(progs["S"])}
    for label, size in (("buy", 5), ("do-not-buy", 4)):
        b, s = buyer_paths.get(label, []), seller_paths.get(label, [])
        if len(b) != size or len(s) != size or not all(_dual(x, y) for x, y in zip(b, s)):
            problems.append(f"{label} path does not pair {size} messages: {b} / {s}")

    expected = {
        20: [("B", "S", '"Hamlet"'), ("S", "B", "10"), ("B", "S", "label buy"),
             ("B", "S", '"221B Baker Street"'), ("S", "B", f'"{SHIP_DATE}"')],
        5: [("B", "S", '"Hamlet"'), ("S", "B", "10"), ("B", "S", "label do-not-buy"), ("S", "B", '"goodbye"')],
    }
    for budget, table in ((20, budget20), (5, budget5)):
        r = run_network(progs, per_process=table)
        trace = [(m.sender, m.receiver, format_payload(m.payload)) for m in r.trace]
        if trace != expected[budget]:
            problems.append(f"budget {budget} trace {trace}")
    r20 = run_network(progs, per_process=budget20)
    r5 = run_network(progs, per_process=budget5)
    if r20.stores["B"].get("date") != SHIP_DATE:
        problems.append("no date at the buyer with budget 20")
    if r5.stores["B"].get("response") != "goodbye":
        problems.append("buyer did not hear goodbye with budget 5")
    report(capsys, 1, not problems, "; ".join(problems) or "check ok, 5+4 message pairings, both traces exact")


def test_criterion_2_merge_ground_truth(capsys):
    problems = []
    merged = merge(read_network('(branch?~> A ([l "Left"]))'), read_network('(branch?~> A ([r "Right"]))'))
    text = print_network(merged)
    if text != '(branch?~> A ([l "Left"] [r "Right"]))':
        problems.append(f"merged prints as {text}")
    try:
        project_program(load("merge_example_nosel.chor"))
        problems.append("projection without selections succeeded")
    except ProjectError as err:
        if err.process != "B" or err.cause.reason != LOCAL_EXPR_MISMATCH:
            problems.append(f"wrong failure: {err}")
    report(capsys, 2, not problems, "; ".join(problems) or "label-union merge exact; missing sel~> gives local-expr-mismatch at B")


def test_criterion_3_projection_clauses(capsys):
    failed = []
    for name, source, process, expected in CLAUSES:
        (term,) = read_choreography(source).body
        if print_network(project_term(term, process)) != expected:
            failed.append(name)
    ok = not failed and len(CLAUSES) == 13
    report(capsys, 3, ok, f"{13 - len(failed)}/13 clause fixtures match" + (f"; failed {failed}" if failed else ""))


def test_criterion_4_merge_algebra(capsys):
    rng = random.Random(2024)
    pairs = triples = assoc_defined = 0
    problems = []
    while pairs < 10_000 or triples < 10_000:
        n1 = gen_network(rng)
        n2, n3 = vary_network(n1, rng), vary_network(n1, rng)
        for n in (n1, n2, n3):
            if merge(n, n) != n:
                problems.append(f"idempotence: {print_network(n)}")
        pairs += 1
        try:
            m12 = merge(n1, n2)
        except MergeError:
            try:
                merge(n2, n1)
                problems.append("symmetry: only one order merges")
            except MergeError:
                pass
            continue
        if A.sort_arms(m12) != A.sort_arms(merge(n2, n1)):
            problems.append(f"symmetry: {print_network(n1)} / {print_network(n2)}")
        triples += 1
        try:
            left = merge(m12, n3)
            right = merge(n1, merge(n2, n3))
        except MergeError:
            continue
        assoc_defined += 1
        if A.sort_arms(left) != A.sort_arms(right):
            problems.append("associativity")
        if len(problems) > 5:
            break
    detail = f"{pairs} pairs, {triples} triples ({assoc_defined} with both groupings defined)"
    report(capsys, 4, not problems and pairs >= 10_000 and triples >= 10_000, "; ".join(problems[:3]) or detail)


def test_criterion_5_no_deadlocks(capsys, generated):
    deadlocks, failures = 0, []
    for i, prog in enumerate(generated):
        try:
            run_network(project_program(prog))
        except DeadlockError:
            deadlocks += 1
        except Exception as err:  # any other failure also counts against the criterion
            failures.append(f"seed {GENERATED_SEED + i}: {err}")
    ok = deadlocks == 0 and not failures
    detail = f"{len(generated)} programs projected and ran; {deadlocks} deadlocks, {len(failures)} other failures"
    report(capsys, 5, ok, detail + (f"; first: {failures[0]}" if failures else ""))


def test_criterion_6_oracle_equivalence(capsys, generated):
    mismatches = []
    for i, prog in enumerate(generated):
        r = diff_run(prog)
        if not r.ok:
            mismatches.append(f"seed {GENERATED_SEED + i}: {r.first}")
    detail = f"{len(generated)} programs, {len(mismatches)} mismatches"
    report(capsys, 6, not mismatches, detail + (f"; first: {mismatches[0]}" if mismatches else ""))


def test_criterion_7_round_trips(capsys, generated):
    failed = []
    fixtures = sorted(FIXTURES.glob("*.chor"))
    for f in fixtures:
        prog = read_choreography(f.read_text(encoding="utf-8"))
        if read_choreography(print_choreography(prog)) != prog:
            failed.append(f.name)
        for net in project_program(prog).values() if f.name != "merge_example_nosel.chor" else ():
            if read_network(print_network(net)) != net:
                failed.append(f"{f.name} projection")
    for i, prog in enumerate(generated):
        if read_choreography(print_choreography(prog)) != prog:
            failed.append(f"seed {GENERATED_SEED + i}")
    detail = f"{len(fixtures)} fixtures and {len(generated)} generated programs"
    report(capsys, 7, not failed, detail + (f"; failed {failed[:5]}" if failed else " round-trip exactly"))
