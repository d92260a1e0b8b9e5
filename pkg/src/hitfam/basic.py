"""DFS, warm-up and chain-with-independent-event families."""

from __future__ import annotations

import itertools
from collections.abc import Iterable

from .errors import InvalidDepthError
from .poset import (
    INDEPENDENT,
    Family,
    Poset,
    Schedule,
    _bits,
    is_admissible,
    make_chain_plus_event,
    tree_preorder,
)


def leftdfs(tree: Poset) -> Schedule:
    return tree_preorder(tree)


def rightdfs(tree: Poset) -> Schedule:
    return tree_preorder(tree, reverse=True)


def dfs_family(tree: Poset) -> Family:
    """Left-to-right and right-to-left DFS; 2-hitting for any tree."""
    return Family(tree, (leftdfs(tree), rightdfs(tree)))


def _path_to(tree: Poset, a: str) -> list[str]:
    return sorted(tree.predecessors(a), key=tree.depth) + [a]


def warmup_rows(tree: Poset, d: int, pivots: Iterable[str] | None = None) -> list[Schedule]:
    """Rows of the warm-up construction before deduplication.

    One bag per admissible arrangement ``(a_1, ..., a_{d-2})``; each bag
    contributes two rows that first schedule the root paths of the ``a_k`` and
    then finish in left resp. right DFS order.  ``pivots`` restricts ``a_1``.
    """
    tree.require_tree()
    if d < 3:
        raise InvalidDepthError(f"warm-up construction needs d >= 3, got {d}")
    left, right = leftdfs(tree), rightdfs(tree)
    firsts = tree.events if pivots is None else [e for e in tree.events if e in set(pivots)]
    k = d - 2
    rows = []
    for a1 in firsts:
        rest = [e for e in tree.events if e != a1]
        for tail in itertools.permutations(rest, k - 1):
            arrangement = (a1,) + tail
            if k >= 2 and not is_admissible(tree, arrangement):
                continue
            prefix: list[str] = []
            done: set[str] = set()
            for a in arrangement:
                for x in _path_to(tree, a):
                    if x not in done:
                        done.add(x)
                        prefix.append(x)
            rows.append(tuple(prefix) + tuple(x for x in left if x not in done))
            rows.append(tuple(prefix) + tuple(x for x in right if x not in done))
    return rows


def warmup_family(tree: Poset, d: int, dedup: bool = True) -> Family:
    fam = Family(tree, warmup_rows(tree, d))
    return fam.dedup() if dedup else fam


def chain_event_schedule(n: int, i: int) -> Schedule:
    """``1 .. i`` then ``*`` then ``i+1 .. n``."""
    chain = [str(j) for j in range(1, n + 1)]
    return tuple(chain[:i] + [INDEPENDENT] + chain[i:])


def chain_event_family(n: int, d: int) -> Family:
    if d < 2:
        raise InvalidDepthError(f"depth must be >= 2, got {d}")
    p = make_chain_plus_event(n)
    positions = [0, n] if d == 2 else range(n + 1)
    return Family(p, tuple(chain_event_schedule(n, i) for i in positions))


def height_lower_bound(p: Poset, d: int) -> int:
    """``m + 1`` for the largest ``m`` with ``Chain_m || {event}`` inside ``p``.

    For each event, the longest chain among the events incomparable to it is
    found by a longest-path pass in topological order.
    """
    if d < 3:
        raise InvalidDepthError(f"chain-plus-event bound applies to d >= 3, got {d}")
    n = len(p)
    # strict ancestors form a strictly growing chain of sets along <
    topo = sorted(range(n), key=lambda i: p.down_mask(i).bit_count())
    best = 0
    for e in range(n):
        free = ((1 << n) - 1) & ~(p.down_mask(e) | p.up_mask(e))
        if not free:
            continue
        longest = {}
        for y in topo:
            if not free >> y & 1:
                continue
            below = p.down_mask(y) & free & ~(1 << y)
            longest[y] = 1 + max((longest[x] for x in _bits(below)), default=0)
        best = max(best, max(longest.values()))
    return best + 1
