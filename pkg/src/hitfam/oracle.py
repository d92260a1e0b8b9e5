"""Brute-force ground truth for small posets.

Everything here enumerates: linear extensions, admissible d-tuples, subsets of
schedules.  The hitting test itself is vectorised with numpy (positions of the
tuple events in every row, then a strict-increase check), but no structure of
the poset is exploited, so these routines serve as an independent check on the
constructions in the other modules.
"""

from __future__ import annotations

import heapq
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InadmissibleError, InfeasibleError, InvalidDepthError, InvalidFamilyError
from .poset import DTuple, Family, Poset, Schedule, _bits, check_tuple, is_admissible

DEFAULT_CAP = 10**6
DEFAULT_TUPLE_BUDGET = 5 * 10**6
# cells of the (rows x tuples) hit matrix materialised at once
_CHUNK_CELLS = 1 << 22


class ScheduleEnumeration(NamedTuple):
    schedules: list[Schedule]
    overflow: bool


@dataclass(frozen=True)
class VerifyReport:
    is_hitting: bool
    admissible_count: int
    first_missed: DTuple | None
    per_row_hit_counts: tuple[int, ...]
    d: int

    def as_dict(self) -> dict:
        return {
            "is_hitting": self.is_hitting,
            "d": self.d,
            "admissible_count": self.admissible_count,
            "first_missed": list(self.first_missed) if self.first_missed else None,
            "per_row_hit_counts": list(self.per_row_hit_counts),
        }


def iter_extension_indices(p: Poset):
    """Yield linear extensions as tuples of event indices, lexicographically."""
    n = len(p)
    children = p._children
    indeg = [len(ps) for ps in p._parents]
    start = 0
    for i in range(n):
        if not indeg[i]:
            start |= 1 << i
    if n == 0:
        yield ()
        return
    order: list[int] = []
    stack = [[start, list(_bits(start)), 0]]
    while stack:
        frame = stack[-1]
        avail, cands, k = frame
        if k:
            for c in children[cands[k - 1]]:
                indeg[c] += 1
            order.pop()
        if k == len(cands):
            stack.pop()
            continue
        i = cands[k]
        frame[2] = k + 1
        order.append(i)
        nxt = avail & ~(1 << i)
        for c in children[i]:
            indeg[c] -= 1
            if not indeg[c]:
                nxt |= 1 << c
        if len(order) == n:
            yield tuple(order)
        else:
            stack.append([nxt, list(_bits(nxt)), 0])


def _extension_indices(p: Poset, cap: int) -> tuple[list[tuple[int, ...]], bool]:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    out = list(itertools.islice(iter_extension_indices(p), cap + 1))
    overflow = len(out) > cap
    return out[:cap], overflow


def enumerate_schedules(p: Poset, cap: int = DEFAULT_CAP) -> ScheduleEnumeration:
    """All schedules of ``p`` in lexicographic order, truncated at ``cap``."""
    idx, overflow = _extension_indices(p, cap)
    ev = p.events
    return ScheduleEnumeration([tuple(ev[i] for i in s) for s in idx], overflow)


def count_schedules(p: Poset, cap: int = DEFAULT_CAP) -> int | None:
    """Number of schedules, or ``None`` when it exceeds ``cap``."""
    n = sum(1 for _ in itertools.islice(iter_extension_indices(p), cap + 1))
    return None if n > cap else n


def _check_depth(p: Poset, d: int) -> None:
    if not 2 <= d <= len(p):
        raise InvalidDepthError(f"depth must satisfy 2 <= d <= |P| = {len(p)}, got {d}")


def admissible_array(p: Poset, d: int, budget: int = DEFAULT_TUPLE_BUDGET) -> np.ndarray:
    """Admissible d-tuples as an ``(T, d)`` index array, in lexicographic order."""
    _check_depth(p, d)
    n = len(p)
    full = (1 << n) - 1
    down = [p.down_mask(i) for i in range(n)]
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def extend(forbidden: int) -> None:
        cands = full & ~forbidden
        if len(prefix) == d - 1:
            base = tuple(prefix)
            out.extend(base + (j,) for j in _bits(cands))
            if len(out) > budget:
                raise InfeasibleError(
                    f"more than {budget} admissible {d}-tuples; raise the budget")
            return
        for j in _bits(cands):
            prefix.append(j)
            extend(forbidden | down[j])
            prefix.pop()

    extend(0)
    if not out:
        return np.zeros((0, d), dtype=np.int32)
    return np.asarray(out, dtype=np.int32)


def enumerate_admissible(p: Poset, d: int) -> list[DTuple]:
    ev = p.events
    return [tuple(ev[i] for i in t) for t in admissible_array(p, d)]


def position_matrix(p: Poset, rows: Sequence[Sequence[str]]) -> np.ndarray:
    """``pos[r, e]`` = position of event ``e`` in row ``r``."""
    idx = np.asarray([[p.index(x) for x in row] for row in rows], dtype=np.int32)
    return _positions_from_indices(idx, len(p))


def _positions_from_indices(idx: np.ndarray, n: int) -> np.ndarray:
    m = idx.shape[0]
    pos = np.empty((m, n), dtype=np.int32)
    if m:
        pos[np.arange(m)[:, None], idx] = np.arange(n, dtype=np.int32)
    return pos


def _hit_chunks(pos: np.ndarray, tuples: np.ndarray):
    """Yield ``(start, hit)`` with ``hit[r, k]`` for tuples[start:start+c]."""
    m = max(pos.shape[0], 1)
    step = max(1, _CHUNK_CELLS // m)
    for start in range(0, len(tuples), step):
        block = pos[:, tuples[start:start + step]]
        yield start, np.all(np.diff(block, axis=2) > 0, axis=2)


def hit_matrix(pos: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Boolean ``(rows, tuples)`` matrix of which row hits which tuple."""
    out = np.zeros((pos.shape[0], len(tuples)), dtype=bool)
    for start, hit in _hit_chunks(pos, tuples):
        out[:, start:start + hit.shape[1]] = hit
    return out


def _family_rows(p: Poset, family) -> tuple[Schedule, ...]:
    if isinstance(family, Family):
        if family.poset != p:
            raise InvalidFamilyError("family belongs to a different poset")
        return family.rows
    rows = tuple(tuple(r) for r in family)
    for k, row in enumerate(rows):
        if not p.is_schedule(row):
            raise InvalidFamilyError(f"row {k} is not a schedule of the poset")
    return rows


def effective_depth(p: Poset, d: int) -> int:
    """Depths beyond ``|P|`` are clamped: every ordering of all events must occur."""
    if d < 2:
        raise InvalidDepthError(f"depth must be >= 2, got {d}")
    return min(d, len(p))


def is_d_hitting(p: Poset, family: Family | Iterable[Sequence[str]], d: int,
                 budget: int = DEFAULT_TUPLE_BUDGET) -> VerifyReport:
    """Check every admissible d-tuple against every row of ``family``."""
    rows = _family_rows(p, family)
    d_eff = effective_depth(p, d)
    if d_eff < 2:
        return VerifyReport(True, 0, None, tuple(0 for _ in rows), d)
    tuples = admissible_array(p, d_eff, budget)
    pos = position_matrix(p, rows)
    per_row = np.zeros(len(rows), dtype=np.int64)
    missed = None
    for start, hit in _hit_chunks(pos, tuples):
        per_row += hit.sum(axis=1)
        if missed is None:
            bad = np.flatnonzero(~hit.any(axis=0))
            if bad.size:
                missed = tuple(p.events[i] for i in tuples[start + bad[0]])
    return VerifyReport(missed is None, len(tuples), missed,
                        tuple(int(c) for c in per_row), d)


def _cover_masks(p: Poset, d: int, cap: int) -> tuple[list[tuple[int, ...]], list[int], int]:
    idx, overflow = _extension_indices(p, cap)
    if overflow:
        raise InfeasibleError(f"poset has more than {cap} schedules")
    d_eff = effective_depth(p, d)
    if d_eff < 2:
        return idx, [0] * len(idx), 0
    tuples = admissible_array(p, d_eff)
    pos = _positions_from_indices(np.asarray(idx, dtype=np.int32), len(p))
    hit = hit_matrix(pos, tuples)
    masks = []
    for row in hit:
        packed = np.packbits(row, bitorder="little").tobytes()
        masks.append(int.from_bytes(packed, "little"))
    return idx, masks, (1 << len(tuples)) - 1


def min_hitting_size(p: Poset, d: int, budget: int = DEFAULT_CAP,
                     max_nodes: int = 10**7) -> int:
    """Exact size of a smallest d-hitting family.

    Iterative deepening over the family size ``k``; each level branches on
    the schedules hitting the uncovered tuple with the fewest such schedules,
    and prunes when ``k`` schedules cannot cover what is left.
    """
    _, masks, full = _cover_masks(p, d, budget)
    if full == 0:
        return 1
    # drop duplicate and dominated schedules; a minimum cover survives this
    uniq = sorted(set(masks), key=lambda m: -m.bit_count())
    kept: list[int] = []
    for m in uniq:
        if not any(m | k == k for k in kept):
            kept.append(m)
    widest = kept[0].bit_count()
    covering = [[m for m in kept if m >> j & 1] for j in range(full.bit_length())]
    visited = 0

    def coverable(left: int, k: int) -> bool:
        nonlocal visited
        visited += 1
        if visited > max_nodes:
            raise InfeasibleError(f"exact search exceeded {max_nodes} nodes")
        if not left:
            return True
        if left.bit_count() > k * widest:
            return False
        options = min((covering[j] for j in _bits(left)), key=len)
        return any(coverable(left & ~m, k - 1) for m in options)

    k = 1
    while not coverable(full, k):
        k += 1
    return k


def schedule_hitting(p: Poset, t: Sequence[str]) -> Schedule:
    """Lexicographically least schedule that orders ``t`` as given."""
    idx = check_tuple(p, t)
    if not is_admissible(p, t):
        raise InadmissibleError(f"tuple {tuple(t)} is not admissible")
    n = len(p)
    succ = [list(c) for c in p._children]
    indeg = [len(ps) for ps in p._parents]
    for a, b in zip(idx, idx[1:]):
        succ[a].append(b)
        indeg[b] += 1
    heap = [i for i in range(n) if not indeg[i]]
    heapq.heapify(heap)
    out = []
    while heap:
        i = heapq.heappop(heap)
        out.append(p.events[i])
        for j in succ[i]:
            indeg[j] -= 1
            if not indeg[j]:
                heapq.heappush(heap, j)
    assert len(out) == n
    return tuple(out)
