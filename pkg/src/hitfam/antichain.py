"""Antichain families: random, greedy, and the counting bounds around them.

Random schedules come from ``random.Random`` (Mersenne Twister) driving a
Fisher-Yates shuffle, so a seed pins the output on every platform.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    InfeasibleError,
    InvalidDepthError,
    InvalidSizeError,
    GenerationFailedError,
    PoolExhaustedError,
)
from .oracle import (
    DEFAULT_CAP,
    DEFAULT_TUPLE_BUDGET,
    _CHUNK_CELLS,
    _extension_indices,
    _positions_from_indices,
    admissible_array,
    effective_depth,
    is_d_hitting,
)
from .poset import Family, Poset, make_antichain

VERIFY_LIMIT = 10


def _check_nd(n: int, d: int) -> None:
    if d < 2:
        raise InvalidDepthError(f"depth must be >= 2, got {d}")
    if n < d:
        raise InvalidSizeError(f"need n >= d, got n={n}, d={d}")


def probabilistic_k(n: int, d: int) -> int:
    """``floor(d! * d * ln n) + 1`` random schedules suffice for ``n**d (1-1/d!)**k < 1``."""
    _check_nd(n, d)
    return math.floor(math.factorial(d) * d * math.log(n)) + 1


def failure_bound(n: int, d: int, k: int) -> float:
    """Union bound ``n**d * (1 - 1/d!)**k`` on a random family missing a tuple."""
    return math.exp(d * math.log(n) + k * math.log1p(-1 / math.factorial(d)))


def fisher_yates(items, rng: random.Random) -> tuple:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return tuple(out)


def random_family(n: int, d: int, seed: int = 0, max_retries: int = 20,
                  verify_limit: int = VERIFY_LIMIT) -> Family:
    """``probabilistic_k(n, d)`` uniform permutations of ``Antichain_n``.

    For ``n <= verify_limit`` the family is checked and redrawn until it is
    d-hitting; larger families come back with ``verified=None``.
    """
    k = probabilistic_k(n, d)
    p = make_antichain(n)
    rng = random.Random(seed)
    if n > verify_limit:
        return Family(p, tuple(fisher_yates(p.events, rng) for _ in range(k)), None)
    report = None
    for _ in range(max_retries + 1):
        rows = tuple(fisher_yates(p.events, rng) for _ in range(k))
        report = is_d_hitting(p, rows, d)
        if report.is_hitting:
            return Family(p, rows, True)
    raise GenerationFailedError(
        f"no {d}-hitting draw in {max_retries + 1} attempts", missed=report.first_missed)


@dataclass(frozen=True)
class SampledPool:
    """Draw ``size`` fresh random schedules per greedy step."""

    size: int = 64
    seed: int = 0
    max_stall: int = 100


def random_schedule_indices(p: Poset, rng: random.Random) -> tuple[int, ...]:
    """Random topological order: uniform choice among enabled events.

    On an antichain this is a uniform random permutation.
    """
    indeg = [len(ps) for ps in p._parents]
    avail = [i for i in range(len(p)) if not indeg[i]]
    out = []
    while avail:
        i = avail.pop(rng.randrange(len(avail)))
        out.append(i)
        for c in p._children[i]:
            indeg[c] -= 1
            if not indeg[c]:
                avail.append(c)
        avail.sort()
    return tuple(out)


def _packed_hits(pos: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Hit matrix packed 8 tuples per byte (little bit order)."""
    m = pos.shape[0]
    step = max(8, (_CHUNK_CELLS // max(m, 1)) // 8 * 8)
    packed = np.zeros((m, (len(tuples) + 7) // 8), dtype=np.uint8)
    for start in range(0, len(tuples), step):
        block = pos[:, tuples[start:start + step]]
        hit = np.all(np.diff(block, axis=2) > 0, axis=2)
        cols = np.packbits(hit, axis=1, bitorder="little")
        packed[:, start // 8:start // 8 + cols.shape[1]] = cols
    return packed


def _unpack_first(mask: np.ndarray, count: int) -> int:
    bits = np.unpackbits(mask, bitorder="little")[:count]
    return int(np.flatnonzero(bits)[0])


def _exact_greedy(cand: np.ndarray, tuples: np.ndarray, n: int) -> list[int]:
    """Greedy cover over all candidates, with gains kept up to date incrementally.

    ``before[a, b]`` packs, over candidates, whether ``a`` precedes ``b``; a
    tuple's hit bits are the AND along its consecutive pairs.  Gains start as
    per-candidate hit counts and lose the hit bits of each newly covered tuple,
    so every tuple is unpacked twice in total.
    """
    m = len(cand)
    pos = _positions_from_indices(cand, n)
    before = np.zeros((n, n, (m + 7) // 8), dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            if a != b:
                before[a, b] = np.packbits(pos[:, a] < pos[:, b], bitorder="little")
    step = max(1, _CHUNK_CELLS // max(m, 1))

    def hit_counts(ts: np.ndarray) -> np.ndarray:
        total = np.zeros(m, dtype=np.int64)
        for start in range(0, len(ts), step):
            block = ts[start:start + step]
            bits = before[block[:, 0], block[:, 1]]
            for j in range(2, ts.shape[1]):
                bits &= before[block[:, j - 1], block[:, j]]
            total += np.unpackbits(bits, axis=1, count=m, bitorder="little").sum(axis=0, dtype=np.int64)
        return total

    gains = hit_counts(tuples)
    uncovered = np.ones(len(tuples), dtype=bool)
    chosen = []
    while uncovered.any():
        best = int(np.argmax(gains))
        assert gains[best] > 0
        chosen.append(best)
        at = pos[best][tuples]
        fresh = uncovered & np.all(np.diff(at, axis=1) > 0, axis=1)
        uncovered &= ~fresh
        gains -= hit_counts(tuples[fresh])
    return chosen


def _sampled_greedy(p: Poset, tuples: np.ndarray, pool: SampledPool) -> list[tuple[int, ...]]:
    count = len(tuples)
    uncovered = np.packbits(np.ones(count, dtype=bool), bitorder="little")
    rng = random.Random(pool.seed)
    chosen = []
    stall = 0
    while uncovered.any():
        cand_idx = [random_schedule_indices(p, rng) for _ in range(pool.size)]
        cand = np.asarray(cand_idx, dtype=np.int32)
        packed = _packed_hits(_positions_from_indices(cand, len(p)), tuples)
        gains = np.bitwise_count(packed & uncovered).sum(axis=1, dtype=np.int64)
        best = int(np.argmax(gains))
        if gains[best] == 0:
            stall += 1
            if stall > pool.max_stall:
                miss = _unpack_first(uncovered, count)
                raise PoolExhaustedError(
                    f"sampled pool made no progress for {pool.max_stall} steps",
                    missed=tuple(p.events[i] for i in tuples[miss]))
            continue
        stall = 0
        chosen.append(cand_idx[best])
        uncovered &= ~packed[best]
    return chosen


def greedy_family(p: Poset, d: int, pool: str | SampledPool = "exact",
                  budget: int = DEFAULT_CAP,
                  tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> Family:
    """Greedy set cover: repeatedly take the schedule hitting most uncovered tuples.

    ``pool="exact"`` scans every schedule of ``p`` (ties go to the first in
    lexicographic order); a :class:`SampledPool` draws fresh random schedules
    at every step instead.
    """
    d_eff = effective_depth(p, d)
    if d_eff < 2:
        first = next(iter(_extension_indices(p, 1)[0]))
        return Family(p, (tuple(p.events[i] for i in first),), True)
    tuples = admissible_array(p, d_eff, tuple_budget)
    if pool == "exact":
        idx, overflow = _extension_indices(p, budget)
        if overflow:
            raise InfeasibleError(f"exact pool needs all schedules; more than {budget}")
        picks = _exact_greedy(np.asarray(idx, dtype=np.int32), tuples, len(p))
        chosen = [idx[k] for k in picks]
    elif isinstance(pool, SampledPool):
        chosen = _sampled_greedy(p, tuples, pool)
    else:
        raise ValueError(f"unknown pool {pool!r}")
    rows = tuple(tuple(p.events[i] for i in s) for s in chosen)
    return Family(p, rows, True)


def greedy_upper_bound(n: int, d: int) -> int:
    """Greedy set-cover bound for at most ``n**d`` tuples, each hit by a ``1/d!`` fraction of schedules."""
    _check_nd(n, d)
    f = math.factorial(d)
    return math.ceil(f * max(0.0, math.log(n**d / f))) + f


def lower_bound(n: int, d: int) -> float:
    """``log (n-1)_r / log (r+1)`` with ``r = floor((d-1)/2)``."""
    if d < 3:
        raise InvalidDepthError(f"counting lower bound needs d >= 3, got {d}")
    r = (d - 1) // 2
    if n <= r:
        raise InvalidSizeError(f"need n > r = {r}, got n={n}")
    falling = math.prod(n - 1 - i for i in range(r))
    return math.log2(falling) / math.log2(r + 1)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    d: int
    lower: float
    lower_d3: float
    greedy_upper: int
    probabilistic_k: int
    slope: float

    def as_dict(self) -> dict:
        return asdict(self)


def bounds_report(n: int, d: int) -> BoundsReport:
    _check_nd(n, d)
    return BoundsReport(
        n=n,
        d=d,
        lower=lower_bound(n, d),
        lower_d3=math.log2(n - 1),
        greedy_upper=greedy_upper_bound(n, d),
        probabilistic_k=probabilistic_k(n, d),
        slope=d / (2 * math.log2(d + 1)),
    )


def before_matrix(family: Family, last: str | None = None) -> np.ndarray:
    """0/1 matrix: row ``i``, column ``j`` is 1 iff row ``i`` puts ``v_j`` before ``last``.

    ``last`` defaults to the final event in canonical order; columns follow
    the canonical order of the remaining events.
    """
    p = family.poset
    last = p.events[-1] if last is None else last
    others = [e for e in p.events if e != last]
    out = np.zeros((len(family), len(others)), dtype=np.uint8)
    for i, row in enumerate(family.rows):
        seen = set()
        for x in row:
            if x == last:
                break
            seen.add(x)
        out[i] = [e in seen for e in others]
    return out


def columns_distinct(matrix: np.ndarray) -> bool:
    cols = {matrix[:, j].tobytes() for j in range(matrix.shape[1])}
    return len(cols) == matrix.shape[1]
