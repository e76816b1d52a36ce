"""Set partitions, non-crossing partitions and pairings of [n] = {1, ..., n}.

Partitions are stored in canonical form: every block is an ascending tuple
and blocks are ordered by their minimum.  Enumeration uses the first-block
decomposition (the block of 1 cuts [n] into independent intervals); the
brute-force filter over all set partitions is kept for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .errors import ResourceLimitError, ValidationError, get_limits


@dataclass(frozen=True)
class SetPartition:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"ground set size must be positive, got {self.n}")
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise ValidationError("empty block")
        seen = [x for b in blocks for x in b]
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ValidationError(
                f"blocks {self.blocks!r} do not partition [1..{self.n}] "
                "(overlapping, missing or out-of-range elements)"
            )
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], n: int | None = None):
        blocks = tuple(tuple(b) for b in blocks)
        if n is None:
            n = max((max(b) for b in blocks if b), default=0)
        return cls(n, blocks)

    def __len__(self):
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def labels(self) -> tuple[int, ...]:
        """Block label (0-based, by order of minimum) of each element 1..n."""
        out = [0] * self.n
        for k, b in enumerate(self.blocks):
            for x in b:
                out[x - 1] = k
        return tuple(out)

    def to_list(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


class NCPartition(SetPartition):
    """A set partition that has been checked to be non-crossing."""

    def __post_init__(self):
        super().__post_init__()
        if _find_crossing(self.blocks) is not None:
            raise ValidationError(f"partition {self.to_list()} is crossing")


def _find_crossing(blocks):
    # two blocks cross iff their merged label sequence has >= 4 runs (ABAB)
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            merged = sorted([(x, 0) for x in blocks[a]] + [(x, 1) for x in blocks[b]])
            runs = 1 + sum(1 for u, v in zip(merged, merged[1:]) if u[1] != v[1])
            if runs >= 4:
                return (a, b)
    return None


def is_noncrossing(p: SetPartition) -> bool:
    """True iff no i<j<k<l with i~k, j~l and i, j in different blocks."""
    if not isinstance(p, SetPartition):
        p = SetPartition.from_blocks(p)
    return _find_crossing(p.blocks) is None


def _check_cap(n, cap):
    cap = get_limits().nc_cap if cap is None else cap
    if n > cap:
        raise ResourceLimitError(
            f"n={n} exceeds the non-crossing enumeration cap {cap}", estimate=catalan(n)
        )


def iter_nc_blocks(
    elems: Sequence, block_ok: Callable[[tuple, bool], bool] | None = None
) -> Iterator[list[tuple]]:
    """Yield NC partitions of the ordered sequence ``elems`` as lists of blocks.

    ``block_ok(block, closed)`` prunes the search: it is called on every
    partial block (``closed=False``) and must be monotone under extension,
    and once more when the block is closed (``closed=True``).
    """
    elems = tuple(elems)
    if not elems:
        yield []
        return
    yield from _grow((elems[0],), elems[1:], block_ok)


def _grow(block, rest, ok):
    if ok is None or ok(block, True):
        for tail in iter_nc_blocks(rest, ok):
            yield [block] + tail
    for j in range(len(rest)):
        new = block + (rest[j],)
        if ok is not None and not ok(new, False):
            continue
        for inner in iter_nc_blocks(rest[:j], ok):
            for outer in _grow(new, rest[j + 1:], ok):
                yield inner + outer


def enumerate_nc(n: int, cap: int | None = None) -> list[NCPartition]:
    """All non-crossing partitions of [n], canonical and lexicographically sorted."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_cap(n, cap)
    return [
        _trusted_nc(n, b)
        for b in sorted(tuple(sorted(blocks)) for blocks in iter_nc_blocks(range(1, n + 1)))
    ]


def enumerate_nc2(n: int, cap: int | None = None) -> list[NCPartition]:
    """Non-crossing pairings of [n]; empty for odd n."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_cap(n, cap)
    if n % 2:
        return []

    def pair_ok(block, closed):
        return len(block) <= 2 and (not closed or len(block) == 2)

    return [
        _trusted_nc(n, b)
        for b in sorted(
            tuple(sorted(blocks)) for blocks in iter_nc_blocks(range(1, n + 1), pair_ok)
        )
    ]


def _trusted_nc(n, blocks):
    # skip the O(|blocks|^2) crossing check for enumerator output
    p = object.__new__(NCPartition)
    object.__setattr__(p, "n", n)
    object.__setattr__(p, "blocks", tuple(blocks))
    return p


def enumerate_set_partitions(n: int) -> Iterator[SetPartition]:
    """All set partitions of [n] via restricted growth strings (Bell(n) of them)."""
    if n < 1:
        raise ValueError("n must be positive")

    def rgs(prefix, m):
        if len(prefix) == n:
            yield prefix
            return
        for k in range(m + 2):
            yield from rgs(prefix + (k,), max(m, k))

    for s in rgs((0,), 0):
        blocks = {}
        for i, k in enumerate(s, start=1):
            blocks.setdefault(k, []).append(i)
        yield SetPartition(n, tuple(tuple(b) for b in blocks.values()))


def count_nc_no_singleton(m: int, j: int) -> int:
    """R_{m,j}: NC partitions of [m] with no singleton and exactly j blocks."""
    if not 1 <= j <= m:
        raise ValueError("need 1 <= j <= m")
    _check_cap(m, None)
    return _no_singleton_counts(m).get(j, 0)


@lru_cache(maxsize=None)
def _no_singleton_counts(m):
    def ok(block, closed):
        return not closed or len(block) >= 2

    counts: dict[int, int] = {}
    for blocks in iter_nc_blocks(range(1, m + 1), ok):
        counts[len(blocks)] = counts.get(len(blocks), 0) + 1
    return counts


def riordan(m: int) -> int:
    """Number of singleton-free NC partitions of [m]."""
    if m == 0:
        return 1
    return sum(count_nc_no_singleton(m, j) for j in range(1, m + 1))


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > 10**6:
        raise ResourceLimitError(f"catalan({m}) is too large to compute")
    return math.comb(2 * m, m) // (m + 1)
