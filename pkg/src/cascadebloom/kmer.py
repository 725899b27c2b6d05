"""DNA k-mers packed two bits per base.

Encoding is A=0, C=1, G=2, T=3 with the first base in the most significant
slot, so integer order on codes equals lexicographic order on strings.

Two layers live here: a scalar API on :class:`Kmer` values, and vectorized
helpers over numpy code arrays.  Code arrays are ``uint64`` for ``k <= 32``
and ``object`` arrays of Python ints above that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import EncodingError, KmerLengthError

BASES = "ACGT"
MAX_K = 128
WORD_K = 32  # largest k whose code fits one uint64

_BASE_CODE = {"A": 0, "C": 1, "G": 2, "T": 3, "a": 0, "c": 1, "g": 2, "t": 3}

_LOOKUP = np.full(256, 255, dtype=np.uint8)
for _ch, _v in _BASE_CODE.items():
    _LOOKUP[ord(_ch)] = _v
del _ch, _v


def check_k(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise KmerLengthError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= MAX_K:
        raise KmerLengthError(f"k must be in [1, {MAX_K}], got {k}")
    return int(k)


@dataclass(frozen=True, order=True)
class Kmer:
    k: int
    code: int

    def __post_init__(self):
        check_k(self.k)
        if not 0 <= self.code < 1 << (2 * self.k):
            raise ValueError(f"code {self.code} out of range for k={self.k}")

    def __len__(self) -> int:
        return self.k

    def __str__(self) -> str:
        return decode(self)

    def __repr__(self) -> str:
        return f"Kmer({decode(self)!r})"


def encode(s: str) -> Kmer:
    """Pack a DNA string (case-insensitive) into a :class:`Kmer`."""
    k = len(s)
    if k == 0 or k > MAX_K:
        raise KmerLengthError(f"k-mer length must be in [1, {MAX_K}], got {k}")
    code = 0
    for pos, ch in enumerate(s):
        v = _BASE_CODE.get(ch)
        if v is None:
            raise EncodingError(f"invalid base {ch!r} at position {pos}", pos)
        code = (code << 2) | v
    return Kmer(k, code)


def decode(x: Kmer) -> str:
    code = x.code
    out = []
    for _ in range(x.k):
        out.append(BASES[code & 3])
        code >>= 2
    return "".join(reversed(out))


def _revcomp_int(code: int, k: int) -> int:
    out = 0
    for _ in range(k):
        out = (out << 2) | (3 - (code & 3))
        code >>= 2
    return out


def reverse_complement(x: Kmer) -> Kmer:
    return Kmer(x.k, _revcomp_int(x.code, x.k))


def canonical(x: Kmer) -> Kmer:
    rc = _revcomp_int(x.code, x.k)
    return x if x.code <= rc else Kmer(x.k, rc)


def neighbors(x: Kmer, canonical_mode: bool = False) -> set[Kmer]:
    """All k-mers one shift-and-extend step away, in either direction.

    At most 8 elements; may contain ``x`` itself for periodic k-mers.
    """
    k = x.k
    mask = (1 << (2 * k)) - 1
    high = 2 * (k - 1)
    codes = set()
    for b in range(4):
        codes.add(((x.code << 2) & mask) | b)
        codes.add((x.code >> 2) | (b << high))
    if canonical_mode:
        codes = {min(c, _revcomp_int(c, k)) for c in codes}
    return {Kmer(k, c) for c in codes}


def kmers_of_sequence(seq: str, k: int) -> Iterator[Kmer]:
    """Yield every all-ACGT window of ``seq`` in order, duplicates included."""
    k = check_k(k)
    mask = (1 << (2 * k)) - 1
    code = 0
    run = 0  # number of consecutive valid bases ending here
    for ch in seq:
        v = _BASE_CODE.get(ch)
        if v is None:
            run = 0
            code = 0
            continue
        code = ((code << 2) & mask) | v
        run += 1
        if run >= k:
            yield Kmer(k, code)


# -- vectorized code arrays ---------------------------------------------------


def code_dtype(k: int):
    return np.uint64 if k <= WORD_K else object


def code_mask(k: int):
    mask = (1 << (2 * k)) - 1
    return np.uint64(mask) if k <= WORD_K else mask


def as_codes(values: Iterable[int], k: int) -> np.ndarray:
    """Coerce ints (or an existing array) into a 1-d code array for ``k``."""
    dtype = code_dtype(k)
    if isinstance(values, np.ndarray) and values.dtype == dtype:
        return values.reshape(-1)
    if isinstance(values, np.ndarray):
        values = values.reshape(-1).tolist()
    vals = [int(v) for v in values]
    if dtype is object:
        arr = np.empty(len(vals), dtype=object)
        arr[:] = vals
        return arr
    return np.array(vals, dtype=np.uint64)


def sequence_codes(seq: str | bytes, k: int) -> np.ndarray:
    """Codes of every all-ACGT length-k window, in order (vectorized)."""
    k = check_k(k)
    raw = seq.encode("ascii", "replace") if isinstance(seq, str) else bytes(seq)
    vals = _LOOKUP[np.frombuffer(raw, dtype=np.uint8)]
    n = len(vals) - k + 1
    if n <= 0:
        return np.empty(0, dtype=code_dtype(k))
    bad = np.concatenate(([0], np.cumsum(vals == 255)))
    valid = (bad[k:] - bad[:-k]) == 0
    if k <= WORD_K:
        v = vals.astype(np.uint64)
        codes = np.zeros(n, dtype=np.uint64)
        for j in range(k):
            codes = (codes << np.uint64(2)) | v[j:j + n]
        return codes[valid]
    # wide k: rolling Python ints, bad bases already masked out by `valid`
    mask = (1 << (2 * k)) - 1
    out = []
    code = 0
    for i, v in enumerate(vals.tolist()):
        code = ((code << 2) & mask) | (v & 3)
        if i >= k - 1:
            out.append(code)
    arr = np.empty(n, dtype=object)
    arr[:] = out
    return arr[valid]


def revcomp_codes(codes: np.ndarray, k: int) -> np.ndarray:
    if k > WORD_K:
        out = np.empty(len(codes), dtype=object)
        out[:] = [_revcomp_int(int(c), k) for c in codes]
        return out
    x = codes.astype(np.uint64) ^ np.uint64((1 << (2 * k)) - 1)
    m2 = np.uint64(0x3333333333333333)
    m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    x = ((x >> np.uint64(2)) & m2) | ((x & m2) << np.uint64(2))
    x = ((x >> np.uint64(4)) & m4) | ((x & m4) << np.uint64(4))
    x = x.byteswap()
    return x >> np.uint64(64 - 2 * k)


def canonical_codes(codes: np.ndarray, k: int) -> np.ndarray:
    rc = revcomp_codes(codes, k)
    return np.where(rc < codes, rc, codes).astype(code_dtype(k))


def neighbor_codes(codes: np.ndarray, k: int, canonical_mode: bool = False) -> np.ndarray:
    """Shape (n, 8) array: 4 right extensions then 4 left extensions per code.

    Rows are not deduplicated.
    """
    mask = code_mask(k)
    dtype = code_dtype(k)
    out = np.empty((len(codes), 8), dtype=dtype)
    if dtype is object:
        shifted = (codes << 2) & mask
        dropped = codes >> 2
        for b in range(4):
            out[:, b] = shifted | b
            out[:, 4 + b] = dropped | (b << (2 * (k - 1)))
    else:
        shifted = (codes << np.uint64(2)) & mask
        dropped = codes >> np.uint64(2)
        for b in range(4):
            out[:, b] = shifted | np.uint64(b)
            out[:, 4 + b] = dropped | np.uint64(b << (2 * (k - 1)))
    if canonical_mode:
        out = canonical_codes(out.reshape(-1), k).reshape(-1, 8)
    return out


def sorted_unique(codes: np.ndarray) -> np.ndarray:
    return np.unique(codes)


def contains_sorted(sorted_codes: np.ndarray, probes: np.ndarray) -> np.ndarray:
    """Boolean mask: which probes occur in the ascending array ``sorted_codes``."""
    n = len(sorted_codes)
    if n == 0:
        return np.zeros(len(probes), dtype=bool)
    idx = np.searchsorted(sorted_codes, probes)
    np.minimum(idx, n - 1, out=idx)
    return np.asarray(sorted_codes[idx] == probes, dtype=bool)


class KmerSet:
    """Exact, deduplicated set of same-length k-mers held as a sorted code array.

    With ``canonical=True`` every member is stored (and every probe looked
    up) in canonical form.
    """

    def __init__(self, k: int, codes, canonical: bool = False):
        self.k = check_k(k)
        self.canonical = bool(canonical)
        codes = as_codes(codes, self.k)
        if len(codes):
            top = max(codes) if codes.dtype == object else codes.max()
            if top >= 1 << (2 * self.k):
                raise ValueError(f"code {top} out of range for k={self.k}")
        if self.canonical:
            codes = canonical_codes(codes, self.k)
        self.codes = sorted_unique(codes)

    @classmethod
    def from_kmers(cls, kmers: Iterable[Kmer | str], canonical: bool = False,
                   k: int | None = None) -> "KmerSet":
        items = [encode(x) if isinstance(x, str) else x for x in kmers]
        lengths = {x.k for x in items}
        if k is not None:
            lengths.add(k)
        if len(lengths) > 1:
            raise KmerLengthError(f"mixed k-mer lengths {sorted(lengths)}")
        if not lengths:
            raise KmerLengthError("cannot infer k from an empty collection")
        return cls(lengths.pop(), [x.code for x in items], canonical)

    @property
    def n(self) -> int:
        return len(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self) -> Iterator[Kmer]:
        for c in self.codes.tolist():
            yield Kmer(self.k, int(c))

    def __contains__(self, x: Kmer | str) -> bool:
        if isinstance(x, str):
            x = encode(x)
        if x.k != self.k:
            return False
        if self.canonical:
            x = canonical(x)
        probe = as_codes([x.code], self.k)
        return bool(contains_sorted(self.codes, probe)[0])

    def __eq__(self, other):
        if not isinstance(other, KmerSet):
            return NotImplemented
        return (self.k, self.canonical) == (other.k, other.canonical) \
            and np.array_equal(self.codes, other.codes)

    def __repr__(self):
        return f"KmerSet(k={self.k}, n={self.n}, canonical={self.canonical})"
