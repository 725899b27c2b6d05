"""Brute-force ground truth for tests: exact sets and exact level recomputation.

Deliberately naive: Python sets of integer codes and a per-k-mer neighbor
loop, sharing nothing with the vectorized build path except the filters'
own accept decisions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cascade import CascadeIndex
from .kmer import Kmer, KmerSet, as_codes


def _revcomp(code: int, k: int) -> int:
    comp = {0: 3, 1: 2, 2: 1, 3: 0}
    out = 0
    for _ in range(k):
        out = out * 4 + comp[code % 4]
        code //= 4
    return out


def exact_neighbors(code: int, k: int, canonical: bool = False) -> set[int]:
    top = 4 ** (k - 1)
    out = set()
    for b in range(4):
        out.add((code % top) * 4 + b)  # drop first base, append b
        out.add(b * top + code // 4)  # prepend b, drop last base
    if canonical:
        out = {min(c, _revcomp(c, k)) for c in out}
    return out


def oracle_membership(t0: KmerSet, x: Kmer) -> bool:
    code = min(x.code, _revcomp(x.code, x.k)) if t0.canonical else x.code
    return x.k == t0.k and code in set(t0.codes.tolist())


class Oracle:
    """Exact membership over a fixed ``T0``, reusable for many probes."""

    def __init__(self, t0: KmerSet):
        self.k = t0.k
        self.canonical = t0.canonical
        self.members = set(int(c) for c in t0.codes.tolist())

    def __contains__(self, code: int) -> bool:
        return code in self.members

    def neighbor_probes(self) -> list[int]:
        """Every member followed by its neighbors, with repetition."""
        out = []
        for x in self.members:
            out.append(x)
            out.extend(exact_neighbors(x, self.k, self.canonical))
        return out

    def restricted_domain(self) -> set[int]:
        """``T0`` together with all neighbors of ``T0``."""
        return set(self.neighbor_probes())


@dataclass
class ExactLevels:
    sets: list[set[int]]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sets)


def _accepted(level, codes: set[int], k: int) -> set[int]:
    ordered = sorted(codes)
    mask = level.contains_codes(as_codes(ordered, k))
    return {c for c, keep in zip(ordered, mask.tolist()) if keep}


def oracle_levels(t0: KmerSet, index: CascadeIndex) -> ExactLevels:
    """Recompute T0..TL from scratch against the index's own filters."""
    k = t0.k
    t0_set = set(int(c) for c in t0.codes.tolist())
    outside = set()
    for x in t0_set:
        outside |= exact_neighbors(x, k, t0.canonical)
    outside -= t0_set
    sets = [t0_set, _accepted(index.levels[0], outside, k)]
    for i in range(2, len(index.levels) + 1):
        sets.append(_accepted(index.levels[i - 1], sets[i - 2], k))
    return ExactLevels(sets)


def verify_structure(t0: KmerSet, index: CascadeIndex) -> list[str]:
    """Set-law violations of ``index`` against a fresh recomputation; empty if sound."""
    exact = oracle_levels(t0, index)
    sets = exact.sets
    problems = []
    if sets[0] & sets[1]:
        problems.append("T0 and T1 intersect")
    for i in range(2, len(sets)):
        if not sets[i] <= sets[i - 2]:
            problems.append(f"T{i} is not a subset of T{i - 2}")
    if exact.counts != index.level_counts:
        problems.append(f"counts {index.level_counts} != recomputed {exact.counts}")
    tail = [int(c) for c in index.tail.tolist()]
    if tail != sorted(sets[-1]):
        problems.append("tail differs from recomputed last set")
    for i, level in enumerate(index.levels, 1):
        stored = sets[i - 1]
        if len(_accepted(level, stored, t0.k)) != len(stored):
            problems.append(f"B{i} rejects an element of T{i - 1}")
    return problems
