"""Events, partial orders, schedules and families.

A :class:`Poset` is built from its Hasse diagram (cover edges).  The
reachability relation is stored as one Python-int bitset per event, so
``leq`` is a shift and a mask.  Events are kept in a canonical order
(:func:`token_key`), which makes every enumeration in the package
deterministic.

Token conventions
-----------------
* trees: the bitstring path of the node, root rendered as ``"e"``;
* double trees: ``"F:<path>"``, ``"L:<path>"``, ``"S:<path>"``;
* chains and antichains: ``"1"`` .. ``"n"``; the independent event is ``"*"``.
"""

from __future__ import annotations

import graphlib
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CollisionError,
    CycleError,
    HasseError,
    InvalidFamilyError,
    InvalidSizeError,
    InvalidTupleError,
    MissingEventError,
    ShapeError,
)

Schedule = tuple[str, ...]
DTuple = tuple[str, ...]

ROOT = "e"


def path_token(path: str) -> str:
    return path if path else ROOT


def token_path(token: str) -> str:
    return "" if token == ROOT else token


def token_key(token: str):
    """Shortlex sort key; ``e`` (the empty path) sorts first within its side."""
    return tuple((len(p), p) for p in (token_path(part) for part in token.split(":")))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Finite partial order given by its cover edges.

    ``repair=True`` drops cover edges that are implied by other edges instead
    of raising :class:`HasseError`; the dropped edges are kept in
    ``repaired``.
    """

    __slots__ = (
        "events", "cover_edges", "repaired", "_index", "_desc", "_anc",
        "_children", "_parents", "_matrix", "_depth",
    )

    def __init__(self, events: Iterable[str], cover_edges: Iterable[tuple[str, str]] = (),
                 *, repair: bool = False):
        events = list(events)
        seen = set()
        for tok in events:
            if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
                raise ValueError(f"invalid event token {tok!r}")
            if tok in seen:
                raise ValueError(f"duplicate event token {tok!r}")
            seen.add(tok)
        self.events: tuple[str, ...] = tuple(sorted(events, key=token_key))
        self._index = {tok: i for i, tok in enumerate(self.events)}
        n = len(self.events)

        edges = set()
        for u, v in cover_edges:
            for tok in (u, v):
                if tok not in self._index:
                    raise MissingEventError(f"edge references unknown event {tok!r}")
            if u == v:
                raise CycleError(f"self-loop on {u!r}", witness=(u, u))
            edges.add((self._index[u], self._index[v]))

        children = [[] for _ in range(n)]
        parents = [[] for _ in range(n)]
        for u, v in edges:
            children[u].append(v)
            parents[v].append(u)

        sorter = graphlib.TopologicalSorter({v: parents[v] for v in range(n)})
        try:
            topo = list(sorter.static_order())
        except graphlib.CycleError as exc:
            cycle = tuple(self.events[i] for i in exc.args[1])
            raise CycleError("cover edges contain a cycle: " + " -> ".join(cycle),
                             witness=cycle) from None

        desc = [0] * n
        for u in reversed(topo):
            mask = 1 << u
            for v in children[u]:
                mask |= desc[v]
            desc[u] = mask

        implied = []
        for u in range(n):
            kids = children[u]
            if len(kids) < 2:
                continue
            for v in kids:
                if any(w != v and desc[w] >> v & 1 for w in kids):
                    implied.append((u, v))
        if implied:
            named = [(self.events[u], self.events[v]) for u, v in implied]
            if not repair:
                raise HasseError("transitively implied edges: "
                                 + ", ".join(f"{a}->{b}" for a, b in named), named)
            for u, v in implied:
                edges.discard((u, v))
                children[u].remove(v)
                parents[v].remove(u)
            self.repaired = tuple(sorted(named, key=lambda e: (token_key(e[0]), token_key(e[1]))))
        else:
            self.repaired = ()

        anc = [0] * n
        for v in topo:
            mask = 1 << v
            for u in parents[v]:
                mask |= anc[u]
            anc[v] = mask

        self._desc = desc
        self._anc = anc
        self._children = [tuple(sorted(c)) for c in children]
        self._parents = [tuple(sorted(p)) for p in parents]
        self.cover_edges = frozenset((self.events[u], self.events[v]) for u, v in edges)
        self._matrix = None
        self._depth = None

    # -- basic protocol ----------------------------------------------------

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __contains__(self, token):
        return token in self._index

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return self.events == other.events and self.cover_edges == other.cover_edges

    def __hash__(self):
        return hash((self.events, self.cover_edges))

    def __repr__(self):
        return f"Poset(n={len(self)}, edges={len(self.cover_edges)})"

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise MissingEventError(f"unknown event {token!r}") from None

    # -- order queries -------------------------------------------------------

    def leq(self, x: str, y: str) -> bool:
        return bool(self._desc[self.index(x)] >> self.index(y) & 1)

    def lt(self, x: str, y: str) -> bool:
        return x != y and self.leq(x, y)

    def comparable(self, x: str, y: str) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def down_mask(self, i: int) -> int:
        """Bitset of event indices ``<=`` event ``i`` (itself included)."""
        return self._anc[i]

    def up_mask(self, i: int) -> int:
        return self._desc[i]

    def predecessors(self, x: str) -> tuple[str, ...]:
        """All ``y < x`` in canonical order."""
        i = self.index(x)
        return tuple(self.events[j] for j in _bits(self._anc[i] & ~(1 << i)))

    def successors(self, x: str) -> tuple[str, ...]:
        i = self.index(x)
        return tuple(self.events[j] for j in _bits(self._desc[i] & ~(1 << i)))

    def children(self, x: str) -> tuple[str, ...]:
        return tuple(self.events[j] for j in self._children[self.index(x)])

    def parents(self, x: str) -> tuple[str, ...]:
        return tuple(self.events[j] for j in self._parents[self.index(x)])

    def minimal(self) -> tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.events) if not self._parents[i])

    def reach_matrix(self) -> np.ndarray:
        """Boolean matrix ``R[i, j]`` = events[i] <= events[j]."""
        if self._matrix is None:
            n = len(self.events)
            m = np.zeros((n, n), dtype=bool)
            for i, mask in enumerate(self._desc):
                for j in _bits(mask):
                    m[i, j] = True
            m.flags.writeable = False
            self._matrix = m
        return self._matrix

    def height(self) -> int:
        """Number of events in a longest chain."""
        if not self.events:
            return 0
        longest = [1] * len(self.events)
        order = graphlib.TopologicalSorter(
            {v: self._parents[v] for v in range(len(self.events))}).static_order()
        for v in order:
            for u in self._parents[v]:
                longest[v] = max(longest[v], longest[u] + 1)
        return max(longest)

    # -- tree helpers --------------------------------------------------------

    @property
    def is_tree(self) -> bool:
        """Rooted tree: a single minimal event and at most one parent per event."""
        if not self.events:
            return False
        return (sum(1 for p in self._parents if not p) == 1
                and all(len(p) <= 1 for p in self._parents))

    def require_tree(self) -> None:
        if not self.is_tree:
            raise ShapeError("operation requires a tree-shaped poset")

    @property
    def root(self) -> str:
        self.require_tree()
        return self.minimal()[0]

    def depth(self, x: str) -> int:
        """Number of edges from the root (trees only)."""
        self.require_tree()
        if self._depth is None:
            depth = [0] * len(self.events)
            for i in range(len(self.events)):
                depth[i] = self._anc[i].bit_count() - 1
            self._depth = depth
        return self._depth[self.index(x)]

    def parent(self, x: str) -> str | None:
        self.require_tree()
        ps = self._parents[self.index(x)]
        return self.events[ps[0]] if ps else None

    def max_outdegree(self) -> int:
        return max((len(c) for c in self._children), default=0)

    # -- derived posets ------------------------------------------------------

    def is_schedule(self, seq: Sequence[str]) -> bool:
        if len(seq) != len(self.events):
            return False
        pos = {}
        for k, tok in enumerate(seq):
            if tok not in self._index or tok in pos:
                return False
            pos[tok] = k
        return all(pos[u] < pos[v] for u, v in self.cover_edges)

    def relabel(self, mapping: Mapping[str, str]) -> Poset:
        targets = [mapping[e] for e in self.events]
        if len(set(targets)) != len(targets):
            raise CollisionError("relabelling is not injective")
        return Poset(targets, [(mapping[u], mapping[v]) for u, v in self.cover_edges])

    def restrict(self, subset: Iterable[str]) -> Poset:
        return restrict(self, subset)


# -- generators ---------------------------------------------------------------


def _positive(n: int, what: str) -> None:
    if n < 1:
        raise InvalidSizeError(f"{what} must be >= 1, got {n}")


def make_chain(n: int) -> Poset:
    _positive(n, "chain length")
    toks = [str(i) for i in range(1, n + 1)]
    return Poset(toks, zip(toks, toks[1:]))


def make_antichain(n: int) -> Poset:
    _positive(n, "antichain size")
    return Poset(str(i) for i in range(1, n + 1))


INDEPENDENT = "*"


def make_chain_plus_event(n: int) -> Poset:
    """``Chain_n`` in parallel with the independent event ``*``."""
    _positive(n, "chain length")
    return parallel_compose(make_chain(n), Poset([INDEPENDENT]))


def make_complete_tree(h: int) -> Poset:
    if h < 0:
        raise InvalidSizeError(f"height must be >= 0, got {h}")
    level = [""]
    paths = [""]
    for _ in range(h):
        level = [p + b for p in level for b in "01"]
        paths += level
    edges = [(path_token(p[:-1]), path_token(p)) for p in paths if p]
    return Poset([path_token(p) for p in paths], edges)


def make_kary_tree(k: int, h: int) -> Poset:
    """Complete ``k``-ary tree of height ``h``; tokens are digit paths."""
    if not 1 <= k <= 10:
        raise InvalidSizeError("arity must be between 1 and 10")
    if h < 0:
        raise InvalidSizeError(f"height must be >= 0, got {h}")
    level = [""]
    paths = [""]
    for _ in range(h):
        level = [p + str(c) for p in level for c in range(k)]
        paths += level
    edges = [(path_token(p[:-1]), path_token(p)) for p in paths if p]
    return Poset([path_token(p) for p in paths], edges)


def tree_from_parents(parents: Mapping[str, str | None]) -> Poset:
    """Tree from a child -> parent map (the root maps to ``None``)."""
    tree = Poset(parents, [(p, c) for c, p in parents.items() if p is not None])
    tree.require_tree()
    return tree


def dt_token(side: str, path: str) -> str:
    return f"{side}:{path_token(path)}"


def dt_split(token: str) -> tuple[str, str]:
    side, _, path = token.partition(":")
    return side, token_path(path)


def make_double_tree(h: int) -> Poset:
    """Two complete binary trees of height ``h`` glued along their ``2**h`` leaves.

    ``F`` events form the tree directed root-to-leaves, ``S`` events the tree
    directed leaves-to-root, and ``L`` events are the shared leaves.
    """
    if h < 1:
        raise InvalidSizeError(f"double-tree half-height must be >= 1, got {h}")
    inner = [""]
    level = [""]
    for _ in range(h - 1):
        level = [p + b for p in level for b in "01"]
        inner += level
    leaves = [p + b for p in level for b in "01"]
    events = [dt_token("F", p) for p in inner] + [dt_token("S", p) for p in inner]
    events += [dt_token("L", p) for p in leaves]
    edges = []
    for p in inner:
        if p:
            edges.append((dt_token("F", p[:-1]), dt_token("F", p)))
            edges.append((dt_token("S", p), dt_token("S", p[:-1])))
    for p in leaves:
        edges.append((dt_token("F", p[:-1]), dt_token("L", p)))
        edges.append((dt_token("L", p), dt_token("S", p[:-1])))
    return Poset(events, edges)


# -- operations ---------------------------------------------------------------


def leq(p: Poset, x: str, y: str) -> bool:
    return p.leq(x, y)


def check_tuple(p: Poset, t: Sequence[str]) -> tuple[int, ...]:
    """Validate a d-tuple against ``p`` and return its event indices."""
    if len(t) < 2:
        raise InvalidTupleError("a d-tuple needs at least 2 events")
    if len(set(t)) != len(t):
        raise InvalidTupleError(f"tuple has repeated events: {tuple(t)}")
    return tuple(p.index(a) for a in t)


def is_admissible(p: Poset, t: Sequence[str]) -> bool:
    """True iff no later entry of ``t`` is strictly below an earlier one."""
    idx = check_tuple(p, t)
    for i in range(len(idx)):
        below = p.down_mask(idx[i])
        for j in idx[i + 1:]:
            if below >> j & 1:
                return False
    return True


def hits(s: Sequence[str], t: Sequence[str]) -> bool:
    """True iff the restriction of schedule ``s`` to the events of ``t`` is ``t``."""
    pos = {tok: k for k, tok in enumerate(s)}
    try:
        where = [pos[a] for a in t]
    except KeyError as exc:
        raise MissingEventError(f"event {exc.args[0]!r} not in schedule") from None
    return all(a < b for a, b in zip(where, where[1:]))


def lca(tree: Poset, u: str, v: str) -> str:
    tree.require_tree()
    iu, iv = tree.index(u), tree.index(v)
    common = tree.down_mask(iu) & tree.down_mask(iv)
    # ancestors form a chain; the deepest one has the most ancestors
    return max((tree.events[j] for j in _bits(common)), key=lambda e: tree.depth(e))


def tree_preorder(tree: Poset, reverse: bool = False) -> Schedule:
    """Depth-first preorder; children in canonical order (reversed if asked)."""
    tree.require_tree()
    out = []
    stack = [tree.root]
    while stack:
        x = stack.pop()
        out.append(x)
        kids = tree.children(x)
        stack.extend(kids if reverse else reversed(kids))
    return tuple(out)


def lca_closure(tree: Poset, xs: Iterable[str]) -> frozenset[str]:
    """Smallest superset of ``xs`` closed under pairwise lca.

    Sorting by preorder, it suffices to add the lca of each adjacent pair.
    """
    tree.require_tree()
    xs = set(xs)
    for x in xs:
        tree.index(x)
    if len(xs) <= 1:
        return frozenset(xs)
    rank = {x: k for k, x in enumerate(tree_preorder(tree))}
    ordered = sorted(xs, key=rank.__getitem__)
    closed = set(ordered)
    closed.update(lca(tree, a, b) for a, b in zip(ordered, ordered[1:]))
    return frozenset(closed)


def restrict(p: Poset, subset: Iterable[str]) -> Poset:
    """Induced sub-order on ``subset``, rebuilt from its own cover relation."""
    keep = set(subset)
    mask = 0
    for tok in keep:
        mask |= 1 << p.index(tok)
    edges = []
    for i in _bits(mask):
        above = p.up_mask(i) & mask & ~(1 << i)
        covered = 0
        for j in _bits(above):
            covered |= p.up_mask(j) & ~(1 << j)
        for j in _bits(above & ~covered):
            edges.append((p.events[i], p.events[j]))
    return Poset(keep, edges)


def restrict_schedule(s: Sequence[str], subset: Iterable[str]) -> Schedule:
    keep = set(subset)
    return tuple(x for x in s if x in keep)


def parallel_compose(p1: Poset, p2: Poset) -> Poset:
    clash = set(p1.events) & set(p2.events)
    if clash:
        raise CollisionError(f"posets share events: {sorted(clash, key=token_key)}")
    return Poset(p1.events + p2.events, p1.cover_edges | p2.cover_edges)


@dataclass(frozen=True)
class Family:
    """Ordered list of schedules of one poset (the rows of the matrix view)."""

    poset: Poset
    rows: tuple[Schedule, ...]
    verified: bool | None = field(default=None, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for k, row in enumerate(rows):
            if not self.poset.is_schedule(row):
                raise InvalidFamilyError(f"row {k} is not a schedule of the poset")

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, k):
        return self.rows[k]

    def dedup(self) -> Family:
        return Family(self.poset, tuple(dict.fromkeys(self.rows)), self.verified)

    def restrict(self, subset: Iterable[str]) -> Family:
        keep = set(subset)
        return Family(restrict(self.poset, keep),
                      tuple(restrict_schedule(r, keep) for r in self.rows))

    def relabel(self, mapping: Mapping[str, str]) -> Family:
        return Family(self.poset.relabel(mapping),
                      tuple(tuple(mapping[x] for x in r) for r in self.rows))
