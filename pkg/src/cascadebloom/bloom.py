"""Plain Bloom filter sized in bits per stored element.

Probe ``i`` of an element is ``(h1 + i*h2) mod m`` (double hashing), where
``h1`` and ``h2`` are two independently seeded 64-bit hashes of the packed
k-mer code and ``h2`` is forced odd.  With ``h = round(r ln 2)`` probes the
false-positive rate is close to ``0.6185 ** r``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .kmer import Kmer

_M64 = (1 << 64) - 1
_FMIX1 = np.uint64(0xFF51AFD7ED558CCD)
_FMIX2 = np.uint64(0xC4CEB9FE1A85EC53)
_WORD_MUL = np.uint64(0x9E3779B97F4A7C15)
_S33 = np.uint64(33)


def _fmix64(h: np.ndarray) -> np.ndarray:
    h = h ^ (h >> _S33)
    h = h * _FMIX1
    h = h ^ (h >> _S33)
    h = h * _FMIX2
    return h ^ (h >> _S33)


def _words(codes: np.ndarray) -> list[tuple[np.ndarray, np.ndarray | None]]:
    """Split codes into little-endian 64-bit words.

    Word 0 is always hashed; higher words only while nonzero, so the hash is
    a function of the integer value alone.
    """
    if codes.dtype != object:
        return [(codes.astype(np.uint64, copy=False), None)]
    ints = codes.tolist()
    nbits = max((c.bit_length() for c in ints), default=0)
    out = []
    for j in range(max(1, (nbits + 63) // 64)):
        shifted = [c >> (64 * j) for c in ints]
        word = np.array([s & _M64 for s in shifted], dtype=np.uint64)
        active = None if j == 0 else np.array([s != 0 for s in shifted], dtype=bool)
        out.append((word, active))
    return out


def hash64(codes: np.ndarray, seed: int) -> np.ndarray:
    """Seeded 64-bit hash of every code in ``codes``."""
    h = np.full(len(codes), seed & _M64, dtype=np.uint64)
    for word, active in _words(codes):
        mixed = _fmix64(h ^ (word * _WORD_MUL))
        h = mixed if active is None else np.where(active, mixed, h)
    return h


def _code_array(x) -> np.ndarray:
    code = x.code if isinstance(x, Kmer) else int(x)
    if code <= _M64:
        return np.array([code], dtype=np.uint64)
    arr = np.empty(1, dtype=object)
    arr[0] = code
    return arr


class BloomFilter:
    """Bit array of ``m`` bits probed ``h`` times per element.

    Bits are packed little-endian: bit ``p`` is bit ``p % 8`` of byte ``p // 8``.
    """

    def __init__(self, m: int, h: int, seed_pair: tuple[int, int],
                 bits: np.ndarray | None = None, n_inserted: int = 0):
        if m < 1:
            raise ParameterError(f"bit-array length must be >= 1, got {m}")
        if h < 1:
            raise ParameterError(f"hash count must be >= 1, got {h}")
        self.m = int(m)
        self.h = int(h)
        self.seed_pair = (int(seed_pair[0]) & _M64, int(seed_pair[1]) & _M64)
        nbytes = (self.m + 7) // 8
        if bits is None:
            bits = np.zeros(nbytes, dtype=np.uint8)
        elif len(bits) != nbytes:
            raise ParameterError(f"expected {nbytes} bitmap bytes, got {len(bits)}")
        self.bits = np.asarray(bits, dtype=np.uint8)
        self.n_inserted = int(n_inserted)

    @classmethod
    def create(cls, n: int, r: float, seed_pair: tuple[int, int]) -> "BloomFilter":
        """Filter for ``n`` elements at ``r`` bits each.

        m = max(1, ceil(r*n)) and h = max(1, round(r ln 2)).
        """
        if not r > 0 or not math.isfinite(r):
            raise ParameterError(f"bits per element must be a positive number, got {r}")
        if n < 0:
            raise ParameterError(f"element count must be >= 0, got {n}")
        m = max(1, math.ceil(r * n))
        h = max(1, math.floor(r * math.log(2) + 0.5))
        return cls(m, h, seed_pair)

    def _hash_pair(self, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h1 = hash64(codes, self.seed_pair[0])
        h2 = hash64(codes, self.seed_pair[1]) | np.uint64(1)
        return h1, h2

    def probes(self, codes: np.ndarray) -> np.ndarray:
        """Shape (n, h) array of bit positions."""
        h1, h2 = self._hash_pair(codes)
        steps = np.arange(self.h, dtype=np.uint64)
        return (h1[:, None] + steps[None, :] * h2[:, None]) % np.uint64(self.m)

    def add_codes(self, codes: np.ndarray) -> None:
        if len(codes) == 0:
            return
        pos = self.probes(codes).reshape(-1)
        np.bitwise_or.at(self.bits, (pos >> np.uint64(3)).astype(np.intp),
                         (np.uint8(1) << (pos & np.uint64(7)).astype(np.uint8)))
        self.n_inserted += len(codes)

    def contains_codes(self, codes: np.ndarray) -> np.ndarray:
        """Boolean acceptance mask for every code."""
        n = len(codes)
        result = np.zeros(n, dtype=bool)
        if n == 0:
            return result
        h1, h2 = self._hash_pair(codes)
        alive = np.arange(n)
        m = np.uint64(self.m)
        # non-members mostly die on the first probe; shrink the batch as we go
        for i in range(self.h):
            pos = (h1 + np.uint64(i) * h2) % m
            byte = self.bits[(pos >> np.uint64(3)).astype(np.intp)]
            keep = ((byte >> (pos & np.uint64(7)).astype(np.uint8)) & 1).astype(bool)
            alive, h1, h2 = alive[keep], h1[keep], h2[keep]
            if len(alive) == 0:
                break
        result[alive] = True
        return result

    def add(self, x: Kmer | int) -> None:
        self.add_codes(_code_array(x))

    def contains(self, x: Kmer | int) -> bool:
        return bool(self.contains_codes(_code_array(x))[0])

    __contains__ = contains

    def popcount(self) -> int:
        return int(np.unpackbits(self.bits, count=self.m, bitorder="little").sum())

    def fill_ratio(self) -> float:
        return self.popcount() / self.m

    def __eq__(self, other):
        if not isinstance(other, BloomFilter):
            return NotImplemented
        return (self.m, self.h, self.seed_pair) == (other.m, other.h, other.seed_pair) \
            and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"BloomFilter(m={self.m}, h={self.h}, n_inserted={self.n_inserted})"
