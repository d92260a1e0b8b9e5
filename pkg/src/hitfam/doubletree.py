"""Logarithmic 3-hitting families for double trees, trees and antichains.

``build_M(h)`` assembles the ``4h`` rows block by block.  Every row splits at
``block_width = 3 * 2**(h-1) - 1`` into a first and a second half; the top
``2h`` rows are the ``[OO | OI]`` blocks and the bottom ``2h`` rows the
``[IO | II]`` blocks.  Going from ``h`` to ``h + 1`` the blocks of the two
sub-double-trees (paths starting with 0 and with 1) are laid side by side and
two traversal rows are appended to each block:

    OO' = F . OO(0) . OO(1)      and  F . left(0),  F . left(1)
    OI' = OI(1) . OI(0) . S      and  left(1) . S,  left(0) . S
    IO' = F . IO(1) . IO(0)      and  F . right(0), F . right(1)
    II' = II(0) . II(1) . S      and  right(1) . S, right(0) . S
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AddressingError, InvalidSizeError
from .oracle import admissible_array
from .poset import (
    Family,
    Poset,
    Schedule,
    dt_split,
    dt_token,
    make_antichain,
    make_complete_tree,
    make_double_tree,
    path_token,
    tree_preorder,
)


def _traverse(levels: int, prefix: str, order: str) -> Schedule:
    if levels == 0:
        return (dt_token("L", prefix),)
    out = [dt_token("F", prefix)]
    for b in order:
        out.extend(_traverse(levels - 1, prefix + b, order))
    out.append(dt_token("S", prefix))
    return tuple(out)


def _check_address(h: int, prefix: str) -> None:
    if h < 1:
        raise InvalidSizeError(f"double-tree half-height must be >= 1, got {h}")
    if len(prefix) > h or set(prefix) - {"0", "1"}:
        raise AddressingError(f"{prefix!r} does not address a sub-double-tree of height {h}")


def left_traversal(h: int, prefix: str = "") -> Schedule:
    """F root, left traversal of subtree 0, then of subtree 1, then S root."""
    _check_address(h, prefix)
    return _traverse(h - len(prefix), prefix, "01")


def right_traversal(h: int, prefix: str = "") -> Schedule:
    _check_address(h, prefix)
    return _traverse(h - len(prefix), prefix, "10")


@dataclass(frozen=True)
class Blocks:
    oo: tuple[Schedule, ...]
    oi: tuple[Schedule, ...]
    io: tuple[Schedule, ...]
    ii: tuple[Schedule, ...]


def build_blocks(levels: int, prefix: str = "") -> Blocks:
    """The four blocks of ``M_levels`` on the sub-double-tree at ``prefix``."""
    f, s = dt_token("F", prefix), dt_token("S", prefix)
    if levels == 1:
        l0, l1 = dt_token("L", prefix + "0"), dt_token("L", prefix + "1")
        first = ((f, l0), (f, l1))
        second = ((l1, s), (l0, s))
        return Blocks(first, second, first, second)
    b0 = build_blocks(levels - 1, prefix + "0")
    b1 = build_blocks(levels - 1, prefix + "1")
    ld0, ld1 = (_traverse(levels - 1, prefix + b, "01") for b in "01")
    rd0, rd1 = (_traverse(levels - 1, prefix + b, "10") for b in "01")
    oo = tuple((f,) + x + y for x, y in zip(b0.oo, b1.oo)) + ((f,) + ld0, (f,) + ld1)
    oi = tuple(x + y + (s,) for x, y in zip(b1.oi, b0.oi)) + (ld1 + (s,), ld0 + (s,))
    io = tuple((f,) + x + y for x, y in zip(b1.io, b0.io)) + ((f,) + rd0, (f,) + rd1)
    ii = tuple(x + y + (s,) for x, y in zip(b0.ii, b1.ii)) + (rd1 + (s,), rd0 + (s,))
    return Blocks(oo, oi, io, ii)


@dataclass(frozen=True)
class MMatrix:
    h: int
    rows: tuple[Schedule, ...]
    block_width: int
    blocks: Blocks


def build_M(h: int) -> MMatrix:
    """The ``4h x (3 * 2**h - 2)`` schedule matrix for the double tree of half-height ``h``.

    Rows are never deduplicated (for ``h = 1`` each schedule appears twice) so
    that row indices line up with the block structure.
    """
    if h < 1:
        raise InvalidSizeError(f"double-tree half-height must be >= 1, got {h}")
    b = build_blocks(h)
    rows = tuple(x + y for x, y in zip(b.oo, b.oi)) + tuple(x + y for x, y in zip(b.io, b.ii))
    return MMatrix(h, rows, 3 * 2 ** (h - 1) - 1, b)


def separation_failures(m: MMatrix) -> list[tuple[str, tuple[str, str]]]:
    """Admissible pairs that some half of ``m`` cannot split across the block boundary.

    A half (top or bottom ``2h`` rows) splits ``(a1, a2)`` when one of its rows
    puts ``a1`` before column ``block_width`` and ``a2`` at or after it.
    """
    p = make_double_tree(m.h)
    pairs = admissible_array(p, 2)
    half = 2 * m.h
    failures = []
    for name, rows in (("top", m.rows[:half]), ("bottom", m.rows[half:])):
        first = np.zeros((len(rows), len(p)), dtype=np.int64)
        for r, row in enumerate(rows):
            for x in row[:m.block_width]:
                first[r, p.index(x)] = 1
        split = first.T @ (1 - first)
        bad = np.flatnonzero(split[pairs[:, 0], pairs[:, 1]] == 0)
        failures.extend((name, (p.events[pairs[k, 0]], p.events[pairs[k, 1]])) for k in bad)
    return failures


def separation_check(m: MMatrix) -> bool:
    return not separation_failures(m)


def doubletree_family(h: int) -> Family:
    return Family(make_double_tree(h), build_M(h).rows)


def tree_family(h: int) -> Family:
    """``M_h`` restricted to the F and L events: a complete binary tree of height ``h``."""
    def relabel(x):
        side, path = dt_split(x)
        return None if side == "S" else path_token(path)
    rows = tuple(tuple(y for y in map(relabel, row) if y is not None) for row in build_M(h).rows)
    return Family(make_complete_tree(h), rows)


def antichain_family_from_leaves(h: int, n: int | None = None) -> Family:
    """``M_h`` restricted to the shared leaves, leaf ``L:b`` renamed ``int(b, 2) + 1``.

    With ``n < 2**h`` only the first ``n`` leaves are kept.
    """
    n = 2**h if n is None else n
    if not 1 <= n <= 2**h:
        raise InvalidSizeError(f"need 1 <= n <= {2**h}, got {n}")
    rows = []
    for row in build_M(h).rows:
        out = []
        for x in row:
            side, path = dt_split(x)
            if side == "L" and int(path, 2) < n:
                out.append(str(int(path, 2) + 1))
        rows.append(tuple(out))
    return Family(make_antichain(n), tuple(rows))


def embedding_codes(tree: Poset) -> tuple[dict[str, str], int]:
    """Fixed-width binary child codes embedding ``tree`` into a complete binary tree.

    Returns the code of every event and the bits used per level.
    """
    tree.require_tree()
    width = max(1, (tree.max_outdegree() - 1).bit_length())
    codes = {}
    for x in tree_preorder(tree):
        parent = tree.parent(x)
        if parent is None:
            codes[x] = ""
        else:
            k = tree.children(parent).index(x)
            codes[x] = codes[parent] + format(k, f"0{width}b")
    return codes, width


def arbitrary_tree_family(tree: Poset) -> Family:
    """3-hitting family for any tree via an order embedding into a complete tree.

    With height ``h`` (in edges) and maximum outdegree ``D >= 2`` the family
    has ``4 * h * ceil(log2 D)`` rows; a path gets its single schedule.
    """
    tree.require_tree()
    if tree.max_outdegree() < 2:
        return Family(tree, (tree_preorder(tree),))
    codes, width = embedding_codes(tree)
    h = tree.height() - 1
    back = {path_token(c): x for x, c in codes.items()}
    rows = tuple(tuple(back[y] for y in row if y in back) for row in tree_family(h * width).rows)
    return Family(tree, rows)
