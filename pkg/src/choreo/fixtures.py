"""Named builtin presets for running choreographies from the command line.

The choreography language has no way to declare host functions, so the CLI
supplies them here.  A fixture gives every process a table of callables and
constants; constants are visible to local expressions as read-only names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

CATALOG = {"Hamlet": 10, "Macbeth": 25, "Othello": 8}
SHIP_DATE = "2026-11-02"


def catalog(title: str) -> int:
    if title not in CATALOG:
        raise KeyError(f"no book titled {title!r}")
    return CATALOG[title]


def ship(title: str, address: str) -> str:
    return SHIP_DATE


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    shared: Mapping[str, Any] = field(default_factory=dict)
    per_process: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)

    def with_overrides(self, overrides: Mapping[str | None, Mapping[str, Any]]) -> Fixture:
        """Apply ``--set`` values; the ``None`` key targets every process."""
        shared = dict(self.shared)
        per = {p: dict(t) for p, t in self.per_process.items()}
        for proc, values in overrides.items():
            if proc is None:
                shared.update(values)
                for table in per.values():
                    for k in values:
                        table.pop(k, None)
            else:
                per.setdefault(proc, {}).update(values)
        return Fixture(self.name, self.description, shared, per)


def _bookseller(budget: int) -> Fixture:
    return Fixture(
        name=f"budget{budget}",
        description=f"bookseller: S has catalog/ship, B wants Hamlet with budget {budget}",
        per_process={
            "S": {"catalog": catalog, "ship": ship},
            "B": {"title": "Hamlet", "address": "221B Baker Street", "budget": budget},
        },
    )


FIXTURES: dict[str, Fixture] = {
    "none": Fixture("none", "standard builtins only"),
    "budget20": _bookseller(20),
    "budget5": _bookseller(5),
}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(sorted(FIXTURES))}") from None


def parse_assignment(text: str) -> tuple[str | None, str, Any]:
    """Parse ``[P.]name=value``; integers stay integers, the rest are strings."""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ValueError(f"expected [P.]name=value, got {text!r}")
    proc, dot, name = key.partition(".")
    if not dot:
        proc, name = None, key
    if not name or (dot and not proc):
        raise ValueError(f"expected [P.]name=value, got {text!r}")
    value: Any = raw
    try:
        value = int(raw)
    except ValueError:
        if len(raw) >= 2 and raw[0] == raw[-1] == '"':
            value = raw[1:-1]
    return proc, name, value
