import json

import pytest

from choreo.cli import EXIT_CHECK, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, FORMAT_ENV, main
from choreo.reader import read_network

from .conftest import FIXTURES


def path(name):
    return str(FIXTURES / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_ok(capsys):
    code, out, _ = run(capsys, "check", path("bookseller.chor"))
    assert code == EXIT_OK
    assert "ok (2 processes)" in out


def test_check_missing_selection(capsys):
    code, out, _ = run(capsys, "check", path("merge_example_nosel.chor"))
    assert code == EXIT_CHECK
    assert out.startswith(f"{path('merge_example_nosel.chor')}:4:3: cannot project for B: local-expr-mismatch")
    assert '"Left" vs "Right"' in out


def test_check_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.chor"
    bad.write_text("(chor (A B)\n  (~> (at A 1) C))\n", encoding="utf-8")
    code, out, _ = run(capsys, "check", str(bad))
    assert code == EXIT_CHECK
    assert ":2:" in out and "parse error" in out


def test_check_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "check", str(tmp_path / "absent.chor"))
    assert code == EXIT_USAGE
    assert "absent.chor" in err


def test_project_buyer(capsys):
    code, out, _ = run(capsys, "project", path("bookseller.chor"), "--process", "B")
    assert code == EXIT_OK
    assert out.startswith("; B\n")
    assert out.index("(send S title)") < out.index("(define cost (recv S))")
    assert "; S" not in out


def test_project_unit(capsys):
    code, out, _ = run(capsys, "project", path("unit.chor"))
    assert code == EXIT_OK
    assert out == "; A\n(seq 1)\n"


def test_project_output_reparses(capsys):
    from choreo.projector import project_program
    from .conftest import load

    _, out, _ = run(capsys, "project", path("bookseller.chor"))
    chunks = [c for c in out.split("; ") if c]
    want = project_program(load("bookseller.chor"))
    for chunk in chunks:
        name, text = chunk.split("\n", 1)
        assert read_network(text) == want[name]


def test_project_unknown_process(capsys):
    code, _, err = run(capsys, "project", path("unit.chor"), "--process", "Z")
    assert code == EXIT_USAGE
    assert "not declared" in err


def test_run_budget20(capsys):
    code, out, _ = run(capsys, "run", path("bookseller.chor"), "--fixture", "budget20")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[:5] == [
        '1. B -> S: "Hamlet"',
        "2. S -> B: 10",
        "3. B -> S: label buy",
        '4. B -> S: "221B Baker Street"',
        '5. S -> B: "2026-11-02"',
    ]
    assert 'date="2026-11-02"' in lines[-1]


def test_run_budget5(capsys):
    code, out, _ = run(capsys, "run", path("bookseller.chor"), "--fixture", "budget5")
    assert code == EXIT_OK
    assert '4. S -> B: "goodbye"' in out.splitlines()


def test_run_set_override(capsys):
    code, out, _ = run(capsys, "run", path("bookseller.chor"), "--fixture", "budget20", "--set", "B.budget=9")
    assert code == EXIT_OK
    assert "label do-not-buy" in out


def test_run_unit(capsys):
    code, out, _ = run(capsys, "run", path("unit.chor"))
    assert code == EXIT_OK
    assert out.strip() == "A: 1"


def test_run_missing_builtins_is_a_runtime_error(capsys):
    code, out, _ = run(capsys, "run", path("bookseller.chor"))
    assert code == EXIT_RUNTIME
    assert "runtime error in" in out


def test_run_bad_assignment(capsys):
    code, _, _ = run(capsys, "run", path("unit.chor"), "--set", "nonsense")
    assert code == EXIT_USAGE


def test_difftest_zero(capsys):
    code, out, _ = run(capsys, "difftest", "--count", "0")
    assert code == EXIT_OK
    assert out.strip() == "ok: 0 programs, 0 mismatches"


def test_difftest_seed_42(capsys):
    code, out, _ = run(capsys, "difftest", "--seed", "42", "--count", "1000")
    assert code == EXIT_OK
    assert out.strip() == "ok: 1000 programs, 0 mismatches"


def test_difftest_with_injected_fault(capsys):
    code, out, _ = run(capsys, "difftest", "--count", "200", "--inject-fault", "merge-drop-arm")
    assert code == EXIT_CHECK
    assert out.startswith("mismatch at seed")
    program = out.split("shrunk counterexample:\n", 1)[1]
    assert program.startswith("(chor")


def test_json_via_environment(monkeypatch, capsys):
    monkeypatch.setenv(FORMAT_ENV, "json")
    code, out, _ = run(capsys, "run", path("bookseller.chor"), "--fixture", "budget5")
    assert code == EXIT_OK
    records = [json.loads(line) for line in out.splitlines()]
    assert [r["kind"] for r in records] == ["message"] * 4 + ["process"] * 2
    assert records[2]["payload"] == {"label": "do-not-buy"}
    assert records[-1]["store"]["response"] == "goodbye"


def test_json_is_stable_for_fixed_seed(capsys):
    first = run(capsys, "--format", "json", "difftest", "--seed", "3", "--count", "20")
    second = run(capsys, "--format", "json", "difftest", "--seed", "3", "--count", "20")
    assert first == second


def test_bad_format_env(monkeypatch, capsys):
    monkeypatch.setenv(FORMAT_ENV, "yaml")
    code, _, _ = run(capsys, "check", path("unit.chor"))
    assert code == EXIT_USAGE


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["check"], ["difftest", "--count", "x"]])
def test_usage_errors_exit_3(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_USAGE
