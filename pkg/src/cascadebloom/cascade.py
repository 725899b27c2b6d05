"""Cascading Bloom filter over a k-mer set.

Level 1 stores the member set ``T0``.  ``T1`` holds the critical false
positives: neighbors of members that are not members but pass level 1.
Level ``i`` stores ``T(i-1)``, and ``T(i)`` keeps the elements of ``T(i-2)``
that level ``i`` accepts.  After ``t`` levels the last set is kept exactly
as a sorted code array (the tail).

A query walks the levels until one rejects.  Rejection at an even level means
"member", at an odd level "not a member".  Passing every level defers to the
tail.  Answers are exact for members and their neighbors.  Other k-mers may
come back as false positives, but members are never missed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bloom import BloomFilter
from .errors import BuildError, KmerLengthError, ParameterError, QueryError
from .kmer import (
    Kmer,
    KmerSet,
    as_codes,
    canonical_codes,
    code_dtype,
    contains_sorted,
    encode,
    neighbor_codes,
    sorted_unique,
)

DEFAULT_SEED = 0x5EEDCBF1
DEFAULT_T = 4
MAX_T = 16


def level_seeds(master_seed: int, level: int) -> tuple[int, int]:
    """Hash seed pair for 1-based ``level``, independent across levels."""
    state = np.random.SeedSequence([int(master_seed), int(level)]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


@dataclass(frozen=True)
class BuildStats:
    n: int
    counts: tuple[int, ...]
    bitmap_bits: tuple[int, ...]
    tail_bits: int
    total_bits: int
    bits_per_kmer: float

    def lines(self) -> list[str]:
        """``key=value`` lines, shared by the build and stats commands."""
        out = [f"N={self.n}", f"levels={len(self.bitmap_bits)}"]
        out += [f"T{i}={c}" for i, c in enumerate(self.counts)]
        out += [f"B{i}_bits={m}" for i, m in enumerate(self.bitmap_bits, 1)]
        out += [
            f"tail_bits={self.tail_bits}",
            f"total_bits={self.total_bits}",
            f"bits_per_kmer={self.bits_per_kmer:.6f}",
        ]
        return out


class CascadeIndex:
    """Built, immutable cascade.  Use :func:`build_cascade` to make one."""

    def __init__(self, k: int, t: int, canonical: bool, levels: list[BloomFilter],
                 tail: np.ndarray, level_counts: Iterable[int]):
        self.k = k
        self.t = t
        self.canonical = canonical
        self.levels = list(levels)
        self.tail = tail
        self.level_counts = tuple(int(c) for c in level_counts)

    def _prepare(self, codes) -> np.ndarray:
        codes = as_codes(codes, self.k)
        if len(codes):
            top = max(codes) if codes.dtype == object else codes.max()
            if top >= 1 << (2 * self.k):
                raise QueryError(f"code {top} out of range for k={self.k}")
        if self.canonical:
            codes = canonical_codes(codes, self.k)
        return codes

    def query_codes(self, codes) -> np.ndarray:
        """Vectorized membership for an array of packed codes."""
        codes = self._prepare(codes)
        result = np.zeros(len(codes), dtype=bool)
        undecided = np.arange(len(codes))
        for j, level in enumerate(self.levels, 1):
            if len(undecided) == 0:
                return result
            accepted = level.contains_codes(codes[undecided])
            result[undecided[~accepted]] = j % 2 == 0
            undecided = undecided[accepted]
        in_tail = contains_sorted(self.tail, codes[undecided])
        result[undecided] = in_tail if len(self.levels) % 2 == 0 else ~in_tail
        return result

    def query(self, x: Kmer | str) -> bool:
        if isinstance(x, str):
            x = encode(x)
        if x.k != self.k:
            raise QueryError(f"k-mer length {x.k} does not match index k={self.k}")
        return bool(self.query_codes([x.code])[0])

    __contains__ = query

    def stats(self) -> BuildStats:
        bitmap_bits = tuple(f.m for f in self.levels)
        tail_bits = 2 * self.k * len(self.tail)
        total = sum(bitmap_bits) + tail_bits
        n = self.level_counts[0]
        return BuildStats(n, self.level_counts, bitmap_bits, tail_bits, total, total / n)

    def __repr__(self):
        return (f"CascadeIndex(k={self.k}, t={self.t}, levels={len(self.levels)}, "
                f"counts={self.level_counts})")


def build_cascade(t0: KmerSet | Iterable[Kmer | str], r: float, t: int = DEFAULT_T,
                  seed: int = DEFAULT_SEED, canonical: bool = False) -> CascadeIndex:
    """Build a cascade of ``t`` filters at ``r`` bits per stored element.

    ``t0`` is a :class:`KmerSet` (whose canonical flag wins) or any iterable of
    same-length k-mers.  Each level is sized from the actual size of the set
    it stores.  Construction stops early if some ``T(i)`` comes out empty.
    """
    if not isinstance(t0, KmerSet):
        try:
            t0 = KmerSet.from_kmers(t0, canonical=canonical)
        except KmerLengthError as e:
            raise BuildError(str(e)) from e
    if len(t0) == 0:
        raise BuildError("cannot build an index over an empty k-mer set")
    if not isinstance(t, int) or not 1 <= t <= MAX_T:
        raise ParameterError(f"t must be an integer in [1, {MAX_T}], got {t!r}")
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")

    k = t0.k
    members = t0.codes
    first = BloomFilter.create(len(members), r, level_seeds(seed, 1))
    first.add_codes(members)

    cand = sorted_unique(neighbor_codes(members, k, t0.canonical).reshape(-1))
    cand = cand[~contains_sorted(members, cand)]
    sets = [members, cand[first.contains_codes(cand)]]
    levels = [first]

    for i in range(2, t + 1):
        if len(sets[-1]) == 0:
            break
        level = BloomFilter.create(len(sets[-1]), r, level_seeds(seed, i))
        level.add_codes(sets[-1])
        levels.append(level)
        prev2 = sets[-2]
        sets.append(prev2[level.contains_codes(prev2)])

    tail = sets[-1] if len(sets[-1]) else np.empty(0, dtype=code_dtype(k))
    return CascadeIndex(k, t, t0.canonical, levels, tail, [len(s) for s in sets])
