"""Text formats, race-pruned families and run statistics.

Poset files::

    poset v1
    events <n>
    event <token>          # n times
    edge <from> <to>       # immediate predecessor first
    race <a> <b>           # unordered

Family files::

    family v1 d=<d>
    <token> <token> ...    # one schedule per line

In both formats ``#`` starts a comment and blank lines are ignored.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field

from .basic import warmup_rows
from .errors import (
    InvalidFamilyError,
    ParseError,
    UnknownEventError,
    UnsupportedDepthError,
)
from .poset import Family, Poset, Schedule, token_key

_FAMILY_HEADER = re.compile(r"family v1 d=(\d+)")


@dataclass(frozen=True)
class AnnotatedPoset:
    poset: Poset
    races: frozenset[frozenset[str]] = field(default_factory=frozenset)

    def __post_init__(self):
        for pair in self.races:
            if len(pair) != 2:
                raise ValueError(f"race {set(pair)} must name two distinct events")
            for tok in pair:
                if tok not in self.poset:
                    raise UnknownEventError(f"race references unknown event {tok!r}")

    def racing_events(self) -> tuple[str, ...]:
        """Events in at least one race, in canonical order."""
        racing = set().union(*self.races) if self.races else set()
        return tuple(e for e in self.poset.events if e in racing)

    def race_pairs(self) -> list[tuple[str, str]]:
        pairs = [tuple(sorted(pair, key=token_key)) for pair in self.races]
        return sorted(pairs, key=lambda ab: (token_key(ab[0]), token_key(ab[1])))


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def parse_poset(text: str, repair: bool = False) -> AnnotatedPoset:
    """Parse a poset file; duplicate edges collapse, implied edges raise unless ``repair``."""
    lines = list(_content_lines(text))
    if not lines or lines[0][1] != ["poset", "v1"]:
        raise ParseError("expected header 'poset v1'", lines[0][0] if lines else 1)
    if len(lines) < 2 or len(lines[1][1]) != 2 or lines[1][1][0] != "events":
        raise ParseError("expected 'events <n>'", lines[1][0] if len(lines) > 1 else None)
    number, (_, count) = lines[1]
    if not count.isdigit():
        raise ParseError(f"event count {count!r} is not a number", number)
    n = int(count)
    events: list[str] = []
    for number, words in lines[2:2 + n]:
        if len(words) != 2 or words[0] != "event":
            raise ParseError(f"expected {n} 'event <token>' lines", number)
        if words[1] in events:
            raise ParseError(f"duplicate event {words[1]!r}", number)
        events.append(words[1])
    if len(events) != n:
        raise ParseError(f"declared {n} events, found {len(events)}")
    known = set(events)
    edges: list[tuple[str, str]] = []
    races: set[frozenset[str]] = set()
    for number, words in lines[2 + n:]:
        if len(words) != 3 or words[0] not in ("edge", "race"):
            raise ParseError(f"expected 'edge a b' or 'race a b', got {' '.join(words)!r}", number)
        kind, a, b = words
        for tok in (a, b):
            if tok not in known:
                raise UnknownEventError(f"{kind} references unknown event {tok!r}", number)
        if kind == "edge":
            edges.append((a, b))
        elif a == b:
            raise ParseError(f"event {a!r} cannot race with itself", number)
        else:
            races.add(frozenset((a, b)))
    try:
        poset = Poset(events, edges, repair=repair)
    except ValueError as exc:
        if type(exc) is ValueError:
            raise ParseError(str(exc)) from None
        raise
    return AnnotatedPoset(poset, frozenset(races))


def serialize_poset(p: Poset | AnnotatedPoset) -> str:
    ap = p if isinstance(p, AnnotatedPoset) else AnnotatedPoset(p)
    poset = ap.poset
    out = ["poset v1", f"events {len(poset)}"]
    out += [f"event {e}" for e in poset.events]
    edges = sorted(poset.cover_edges, key=lambda uv: (token_key(uv[0]), token_key(uv[1])))
    out += [f"edge {u} {v}" for u, v in edges]
    out += [f"race {a} {b}" for a, b in ap.race_pairs()]
    return "\n".join(out) + "\n"


def parse_family(text: str, poset: Poset | None = None) -> tuple[int, tuple[Schedule, ...]]:
    """Return ``(d, rows)``; rows are checked against ``poset`` when given."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("expected header 'family v1 d=<d>'", 1)
    number, words = lines[0]
    m = _FAMILY_HEADER.fullmatch(" ".join(words))
    if not m:
        raise ParseError("expected header 'family v1 d=<d>'", number)
    rows = tuple(tuple(words) for _, words in lines[1:])
    if poset is not None:
        for (number, _), row in zip(lines[1:], rows):
            if not poset.is_schedule(row):
                raise InvalidFamilyError(f"line {number}: not a schedule of the poset")
    return int(m[1]), rows


def serialize_family(family: Family | Iterable[Schedule], d: int,
                     comments: Iterable[str] = ()) -> str:
    out = [f"family v1 d={d}"]
    out += [f"# {c}" for c in comments]
    out += [" ".join(row) for row in family]
    return "\n".join(out) + "\n"


def pruned_family(ap: AnnotatedPoset, d: int = 3) -> Family:
    """Warm-up rows with the first bag event restricted to racing events.

    Yields exactly ``2r`` rows for ``r`` racing events; rows are not
    deduplicated.  Pruning trades completeness for a smaller family.
    """
    if d != 3:
        raise UnsupportedDepthError(f"race pruning is defined for d = 3, got {d}")
    ap.poset.require_tree()
    return Family(ap.poset, tuple(warmup_rows(ap.poset, 3, pivots=ap.racing_events())))


@dataclass(frozen=True)
class RunStats:
    n_events: int
    height: int
    family_size: int
    method: str
    verified: bool | None = None
    admissible_tuples: int | None = None

    def __post_init__(self):
        if self.family_size < 0:
            raise ValueError("family_size must be >= 0")

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def poset_summary(ap: AnnotatedPoset) -> dict:
    """Size figures for a poset file, including the d = 3 warm-up and pruned row counts."""
    p = ap.poset
    out = {
        "n_events": len(p),
        "height": p.height(),
        "cover_edges": len(p.cover_edges),
        "races": len(ap.races),
        "racing_events": len(ap.racing_events()),
        "is_tree": p.is_tree,
    }
    if p.is_tree:
        out["warmup_d3_rows"] = 2 * len(p)
        out["pruned_d3_rows"] = 2 * len(ap.racing_events())
    return out
