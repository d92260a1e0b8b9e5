"""Pattern-based d-hitting families for complete binary trees.

A pattern abstracts where a d-tuple sits in the tree: the shape of the
lca-closure of its events (a binary tree whose two-child nodes know which child
is left), the layer of every inner node, and the order in which the tuple is to
be hit.  One schedule per pattern hits every tuple conforming to it, so
schedules over all patterns form a d-hitting family.

Patterns are stored with nodes numbered in canonical preorder: the ``sib = 0``
child before the ``sib = 1`` child; an only child carries no ``sib``.  The text
form used for dumps is

    d=<int>;h=<int>;tree=<node>;heval=<ints>;patsch=<ints>
    node := "L" | "U(" node ")" | "B(" node "," node ")"

where ``heval`` lists the layers of inner nodes in preorder and ``patsch``
lists preorder indices in schedule order.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

from .errors import InadmissibleError, InfeasibleError, InvalidPatternError, ShapeError
from .oracle import schedule_hitting
from .poset import (
    Family,
    Poset,
    Schedule,
    is_admissible,
    lca_closure,
    make_complete_tree,
    path_token,
    token_path,
)

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class Pattern:
    d: int
    h: int
    parent: tuple[int | None, ...]
    sib: tuple[int | None, ...]
    heval: tuple[int | None, ...]
    patsch: tuple[int, ...]
    children: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kids = [[] for _ in self.parent]
        for v, u in enumerate(self.parent):
            if u is not None:
                kids[u].append(v)
        object.__setattr__(self, "children", tuple(tuple(k) for k in kids))
        problem = self._problem()
        if problem:
            raise InvalidPatternError(problem)

    def _problem(self) -> str | None:
        n, d = len(self.parent), self.d
        if not (len(self.sib) == len(self.heval) == n):
            return "component lengths differ"
        if not d <= n <= 2 * d - 1:
            return f"|D| = {n} outside [{d}, {2 * d - 1}]"
        if self.parent[0] is not None or any(u is None for u in self.parent[1:]):
            return "node 0 must be the only root"
        if any(u >= v for v, u in enumerate(self.parent) if u is not None):
            return "nodes are not numbered in preorder"
        inner = [v for v in range(n) if self.children[v]]
        if len(inner) > d - 1:
            return f"{len(inner)} non-leaf nodes, at most {d - 1} allowed"
        for v, kids in enumerate(self.children):
            if len(kids) > 2:
                return f"node {v} has outdegree {len(kids)}"
            if len(kids) == 1 and self.sib[kids[0]] is not None:
                return f"only child {kids[0]} must not carry sib"
            if len(kids) == 2 and tuple(self.sib[k] for k in kids) != (0, 1):
                return f"children of node {v} must carry sib 0 then 1"
            if kids and not 0 <= (self.heval[v] if self.heval[v] is not None else -1) < self.h:
                return f"inner node {v} needs heval in [0, {self.h - 1}]"
            if not kids and self.heval[v] is not None:
                return f"leaf {v} must not carry heval"
            if kids and self.parent[v] is not None and self.heval[self.parent[v]] >= self.heval[v]:
                return f"heval must increase from node {self.parent[v]} to {v}"
        if self.sib[0] is not None:
            return "root must not carry sib"
        # preorder: each subtree occupies a contiguous index range
        order = []
        stack = [0]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        if order != list(range(n)):
            return "nodes are not numbered in canonical preorder"
        if sorted(self.patsch) != list(range(n)):
            return "patsch is not a permutation of D"
        where = {v: k for k, v in enumerate(self.patsch)}
        if any(where[u] > where[v] for v, u in enumerate(self.parent) if u is not None):
            return "patsch does not respect the pattern tree"
        return None

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def layer(self, v: int) -> int:
        """``heval`` extended with ``h`` on leaves."""
        return self.h if self.is_leaf(v) else self.heval[v]

    def tree_string(self) -> str:
        def render(v):
            kids = self.children[v]
            if not kids:
                return "L"
            if len(kids) == 1:
                return f"U({render(kids[0])})"
            return f"B({render(kids[0])},{render(kids[1])})"
        return render(0)

    def serialize(self) -> str:
        heval = ",".join(str(x) for x in self.heval if x is not None)
        patsch = ",".join(map(str, self.patsch))
        return f"d={self.d};h={self.h};tree={self.tree_string()};heval={heval};patsch={patsch}"


_LINE = re.compile(r"d=(\d+);h=(\d+);tree=([LUB(),]+);heval=([\d,]*);patsch=([\d,]+)")


def _shape_arrays(tree: str) -> tuple[list[int | None], list[int | None]]:
    parent: list[int | None] = []
    sib: list[int | None] = []
    pos = 0

    def node(par, side):
        nonlocal pos
        v = len(parent)
        parent.append(par)
        sib.append(side)
        kind = tree[pos]
        pos += 1
        if kind == "L":
            return
        if tree[pos] != "(":
            raise InvalidPatternError(f"expected '(' at {pos} in {tree!r}")
        pos += 1
        if kind == "U":
            node(v, None)
        elif kind == "B":
            node(v, 0)
            if tree[pos] != ",":
                raise InvalidPatternError(f"expected ',' at {pos} in {tree!r}")
            pos += 1
            node(v, 1)
        else:
            raise InvalidPatternError(f"unknown node kind {kind!r}")
        if tree[pos] != ")":
            raise InvalidPatternError(f"expected ')' at {pos} in {tree!r}")
        pos += 1

    try:
        node(None, None)
    except IndexError:
        raise InvalidPatternError(f"truncated tree {tree!r}") from None
    if pos != len(tree):
        raise InvalidPatternError(f"trailing characters in tree {tree!r}")
    return parent, sib


def parse_pattern(line: str) -> Pattern:
    m = _LINE.fullmatch(line.strip())
    if not m:
        raise InvalidPatternError(f"malformed pattern line {line!r}")
    d, h = int(m[1]), int(m[2])
    parent, sib = _shape_arrays(m[3])
    inner_layers = [int(x) for x in m[4].split(",") if x]
    is_inner = [False] * len(parent)
    for u in parent:
        if u is not None:
            is_inner[u] = True
    if len(inner_layers) != sum(is_inner):
        raise InvalidPatternError("heval count does not match the inner nodes")
    it = iter(inner_layers)
    heval = [next(it) if inner else None for inner in is_inner]
    patsch = tuple(int(x) for x in m[5].split(","))
    return Pattern(d, h, tuple(parent), tuple(sib), tuple(heval), patsch)


# -- enumeration --------------------------------------------------------------


def pattern_count_bound(d: int, h: int) -> float:
    """``4**(2d-1) / 3 * h**(d-1) * (2d-1)!``."""
    return 4 ** (2 * d - 1) / 3 * h ** (d - 1) * math.factorial(2 * d - 1)


def _shapes(max_nodes: int, max_inner: int, max_depth: int):
    """Planar shapes as nested tuples with their node and inner-node counts."""
    yield ("L",), 1, 0
    if max_nodes < 2 or max_inner < 1 or max_depth < 1:
        return
    for c, cn, ci in _shapes(max_nodes - 1, max_inner - 1, max_depth - 1):
        yield ("U", c), cn + 1, ci + 1
    for a, an, ai in _shapes(max_nodes - 2, max_inner - 1, max_depth - 1):
        for b, bn, bi in _shapes(max_nodes - 1 - an, max_inner - 1 - ai, max_depth - 1):
            yield ("B", a, b), 1 + an + bn, 1 + ai + bi


def _flatten(shape) -> tuple[list[int | None], list[int | None]]:
    parent: list[int | None] = []
    sib: list[int | None] = []

    def walk(s, par, side):
        v = len(parent)
        parent.append(par)
        sib.append(side)
        if s[0] == "U":
            walk(s[1], v, None)
        elif s[0] == "B":
            walk(s[1], v, 0)
            walk(s[2], v, 1)

    walk(shape, None, None)
    return parent, sib


def _layer_assignments(parent, children, h) -> Iterator[list[int | None]]:
    n = len(parent)
    inner = [v for v in range(n) if children[v]]
    heval: list[int | None] = [None] * n

    def assign(k):
        if k == len(inner):
            yield list(heval)
            return
        v = inner[k]
        low = 0 if parent[v] is None else heval[parent[v]] + 1
        for x in range(low, h):
            heval[v] = x
            yield from assign(k + 1)
        heval[v] = None

    yield from assign(0)


def _tree_schedules(children, n) -> Iterator[tuple[int, ...]]:
    order: list[int] = []

    def rec(avail):
        if len(order) == n:
            yield tuple(order)
            return
        for v in sorted(avail):
            order.append(v)
            yield from rec((avail - {v}) | set(children[v]))
            order.pop()

    yield from rec({0})


def enumerate_patterns(d: int, h: int, budget: int = DEFAULT_BUDGET) -> list[Pattern]:
    """Every pattern for depth ``d`` and tree height ``h``, each once, in canonical order."""
    if d < 2:
        raise InvalidPatternError(f"depth must be >= 2, got {d}")
    if h < 1:
        raise InvalidPatternError(f"height must be >= 1, got {h}")
    out: list[Pattern] = []
    seen: set[str] = set()
    for shape, nodes, inner in _shapes(2 * d - 1, d - 1, h):
        if nodes < d:
            continue
        parent, sib = _flatten(shape)
        children = [[] for _ in parent]
        for v, u in enumerate(parent):
            if u is not None:
                children[u].append(v)
        scheds = list(_tree_schedules(children, nodes))
        for heval in _layer_assignments(parent, children, h):
            for patsch in scheds:
                p = Pattern(d, h, tuple(parent), tuple(sib), tuple(heval), patsch)
                key = p.serialize()
                if key in seen:
                    continue
                seen.add(key)
                out.append(p)
                if len(out) > budget:
                    raise InfeasibleError(
                        f"more than {budget} patterns for d={d}, h={h} "
                        f"(upper bound {pattern_count_bound(d, h):.6g})")
    return out


# -- tuples and conformance ----------------------------------------------------


def _tree_height(tree: Poset) -> int:
    h = tree.height() - 1
    if tree != make_complete_tree(h):
        raise ShapeError("patterns are defined on complete binary trees")
    return h


def _closure_layout(tree: Poset, events: Sequence[str]):
    """Canonical preorder of the lca-closure of ``events``: nodes, parents, sib."""
    closure = sorted(lca_closure(tree, events), key=lambda x: len(token_path(x)))
    paths = [token_path(x) for x in closure]
    members = set(paths)
    kids: dict[str, list[str]] = {q: [] for q in paths}
    root = paths[0]
    for q in paths[1:]:
        anc = next(q[:k] for k in range(len(q) - 1, -1, -1) if q[:k] in members)
        kids[anc].append(q)
    nodes: list[str] = []
    parent: list[int | None] = []
    sib: list[int | None] = []

    def walk(q, par, side):
        v = len(nodes)
        nodes.append(q)
        parent.append(par)
        sib.append(side)
        below = sorted(kids[q], key=lambda c: c[len(q)])
        if len(below) == 1:
            walk(below[0], v, None)
        else:
            for c in below:
                walk(c, v, int(c[len(q)]))

    walk(root, None, None)
    return nodes, parent, sib


def pattern_of_tuple(tree: Poset, t: Sequence[str]) -> Pattern:
    """The pattern read off an admissible tuple, hit order from ``schedule_hitting``."""
    h = _tree_height(tree)
    if not is_admissible(tree, t):
        raise InadmissibleError(f"tuple {tuple(t)} is not admissible")
    nodes, parent, sib = _closure_layout(tree, t)
    inner = set(u for u in parent if u is not None)
    heval = tuple(len(q) if v in inner else None for v, q in enumerate(nodes))
    rank = {path_token(q): v for v, q in enumerate(nodes)}
    patsch = tuple(rank[x] for x in schedule_hitting(tree, t) if x in rank)
    return Pattern(len(t), h, tuple(parent), tuple(sib), heval, patsch)


def conforms(tree: Poset, t: Sequence[str], p: Pattern) -> bool:
    if len(t) != p.d or len(set(t)) != len(t):
        return False
    nodes, parent, sib = _closure_layout(tree, t)
    if tuple(parent) != p.parent or tuple(sib) != p.sib:
        return False
    for v, q in enumerate(nodes):
        if not p.is_leaf(v) and p.heval[v] != len(q):
            return False
    rank = {path_token(q): v for v, q in enumerate(nodes)}
    where = {v: k for k, v in enumerate(p.patsch)}
    steps = [where[rank[a]] for a in t]
    return all(a < b for a, b in zip(steps, steps[1:]))


# -- cutting procedure ---------------------------------------------------------


@dataclass(frozen=True)
class CutState:
    """Snapshot taken just before the pieces of pattern node ``node`` are scheduled."""

    node: int
    enabled: dict[int, tuple[str, ...]]
    scheduled: tuple[str, ...]
    layers: tuple[int, ...]

    def violations(self) -> list[str]:
        out = []
        roots = [token_path(x) for x in self.enabled[self.node]]
        done = set(self.scheduled)
        for i, a in enumerate(roots):
            if any(b.startswith(a) or a.startswith(b) for b in roots[i + 1:]):
                out.append(f"E({self.node}) is not an antichain")
            if path_token(a) in done:
                out.append(f"{path_token(a)} already scheduled")
            if a and path_token(a[:-1]) not in done:
                out.append(f"parent of {path_token(a)} not scheduled")
            if len(a) > self.layers[self.node]:
                out.append(f"{path_token(a)} below layer {self.layers[self.node]}")
        return out


def _piece(root: str, limit: int) -> list[str]:
    out = []
    stack = [root]
    while stack:
        q = stack.pop()
        out.append(path_token(q))
        if len(q) < limit:
            stack.extend((q + "1", q + "0"))
    return out


def cut_pieces(p: Pattern, h: int | None = None) -> Iterator[tuple[CutState, list[str]]]:
    """Run the cutting procedure, yielding each state and the piece ``U(c)`` it schedules."""
    h = p.h if h is None else h
    if any(x is not None and x >= h for x in p.heval):
        raise InvalidPatternError(f"pattern layers do not fit a tree of height {h}")
    layers = tuple(h if p.is_leaf(v) else p.heval[v] for v in range(len(p.parent)))
    enabled: dict[int, tuple[str, ...]] = {0: (path_token(""),)}
    scheduled: list[str] = []
    for c in p.patsch:
        state = CutState(c, dict(enabled), tuple(scheduled), layers)
        roots = [token_path(x) for x in enabled[c]]
        piece = [x for r in roots for x in _piece(r, layers[c])]
        yield state, piece
        scheduled.extend(piece)
        kids = p.children[c]
        if not kids:
            continue
        grow = layers[c] + 1
        fresh = sorted(r + format(k, f"0{grow - len(r)}b") if grow > len(r) else r
                       for r in roots for k in range(2 ** (grow - len(r))))
        if len(kids) == 1:
            enabled[kids[0]] = tuple(path_token(z) for z in fresh)
        else:
            for k in kids:
                enabled[k] = tuple(path_token(z) for z in fresh if z[-1] == str(p.sib[k]))


def schedule_for_pattern(p: Pattern, h: int | None = None) -> Schedule:
    out = [x for _, piece in cut_pieces(p, h) for x in piece]
    return tuple(out)


def pattern_family(d: int, h: int, budget: int = DEFAULT_BUDGET) -> Family:
    rows = dict.fromkeys(schedule_for_pattern(p) for p in enumerate_patterns(d, h, budget))
    return Family(make_complete_tree(h), tuple(rows))
