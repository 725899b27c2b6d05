"""FASTA input and the binary index file format.

Index file layout, little-endian throughout::

    magic      4   b"CBF1"
    version    1   1
    flags      1   bit 0 = canonical
    k          2
    t          1   requested level count
    L          1   stored level count (L <= t)
    counts     8 * (L + 1)   |T0| .. |TL|
    per level: m 8, h 1, seed_pair 2*8, bitmap ceil(m/8) bytes (low bit first)
    tail count 8, then ceil(2k/8)-byte codes, strictly ascending
    checksum   8   FNV-1a 64 over every preceding byte
"""

from __future__ import annotations

import io
import os
import struct
import tempfile
from typing import IO, Iterable, Iterator

import numpy as np

from .bloom import BloomFilter
from .cascade import MAX_T, CascadeIndex
from .errors import FormatError, UnsupportedVersionError
from .kmer import MAX_K, KmerSet, check_k, code_dtype, sequence_codes

MAGIC = b"CBF1"
VERSION = 1
FLAG_CANONICAL = 0x01

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_M64 = (1 << 64) - 1


def read_fasta(source: IO | Iterable[bytes | str]) -> Iterator[tuple[str, str]]:
    """Yield ``(header, sequence)`` records; sequences are uppercased.

    Multi-line sequences are joined; blank lines, CRLF endings and
    whitespace inside sequence lines are ignored.
    """
    header = None
    chunks: list[str] = []
    for lineno, raw in enumerate(source, 1):
        line = raw.decode("latin-1") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if header is not None:
                yield header, "".join(chunks)
            header = line[1:].strip()
            chunks = []
        elif header is None:
            raise FormatError(f"line {lineno}: expected a '>' header line", line=lineno)
        else:
            chunks.append("".join(line.split()).upper())
    if header is not None:
        yield header, "".join(chunks)


def collect_kmers(records: Iterable[tuple[str, str]], k: int,
                  canonical: bool = False) -> KmerSet:
    """Distinct k-mers over all records (windows containing non-ACGT skipped)."""
    k = check_k(k)
    parts = [sequence_codes(seq, k) for _, seq in records]
    codes = np.concatenate(parts) if parts else np.empty(0, dtype=code_dtype(k))
    return KmerSet(k, codes, canonical)


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _M64
    return h


def _tail_bytes(codes: np.ndarray, k: int) -> bytes:
    width = (2 * k + 7) // 8
    if codes.dtype == object:
        return b"".join(int(c).to_bytes(width, "little") for c in codes)
    raw = codes.astype("<u8").view(np.uint8).reshape(-1, 8)
    return raw[:, :width].tobytes()


def _tail_codes(data: bytes, count: int, k: int) -> np.ndarray:
    width = (2 * k + 7) // 8
    if code_dtype(k) is object:
        out = np.empty(count, dtype=object)
        out[:] = [int.from_bytes(data[i:i + width], "little")
                  for i in range(0, count * width, width)]
        return out
    raw = np.zeros((count, 8), dtype=np.uint8)
    raw[:, :width] = np.frombuffer(data, dtype=np.uint8).reshape(count, width)
    return raw.view("<u8").reshape(-1).astype(np.uint64)


def index_to_bytes(ix: CascadeIndex) -> bytes:
    buf = io.BytesIO()
    flags = FLAG_CANONICAL if ix.canonical else 0
    buf.write(MAGIC)
    buf.write(struct.pack("<BBHBB", VERSION, flags, ix.k, ix.t, len(ix.levels)))
    buf.write(struct.pack(f"<{len(ix.level_counts)}Q", *ix.level_counts))
    for f in ix.levels:
        buf.write(struct.pack("<QBQQ", f.m, f.h, *f.seed_pair))
        buf.write(f.bits.tobytes())
    buf.write(struct.pack("<Q", len(ix.tail)))
    buf.write(_tail_bytes(ix.tail, ix.k))
    body = buf.getvalue()
    return body + struct.pack("<Q", fnv1a64(body))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"truncated file: length mismatch reading {what}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def index_from_bytes(data: bytes) -> CascadeIndex:
    """Parse and validate an index; raises :class:`FormatError` on any defect."""
    rd = _Reader(data)
    if len(data) == 0:
        raise FormatError("empty index file")
    if rd.take(4, "magic") != MAGIC:
        raise FormatError("bad magic: not a cascade index file")
    (version,) = rd.unpack("<B", "version")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported index version {version}")
    flags, k, t, nlevels = rd.unpack("<BHBB", "header")
    if flags & ~FLAG_CANONICAL:
        raise FormatError(f"unknown flag bits 0x{flags:02x}")
    if not 1 <= k <= MAX_K:
        raise FormatError(f"k={k} out of range")
    if not 1 <= t <= MAX_T or not 1 <= nlevels <= t:
        raise FormatError(f"level counts out of range (t={t}, stored={nlevels})")
    counts = rd.unpack(f"<{nlevels + 1}Q", "level counts")
    if counts[0] == 0:
        raise FormatError("index has no members")

    levels = []
    for i in range(nlevels):
        m, h, s1, s2 = rd.unpack("<QBQQ", f"level {i + 1} header")
        if m == 0 or h == 0:
            raise FormatError(f"level {i + 1}: m and h must be positive")
        nbytes = (m + 7) // 8
        bits = np.frombuffer(rd.take(nbytes, f"level {i + 1} bitmap"), dtype=np.uint8).copy()
        if m % 8 and bits[-1] >> (m % 8):
            raise FormatError(f"level {i + 1}: padding bits set past m")
        levels.append(BloomFilter(m, h, (s1, s2), bits, n_inserted=counts[i]))

    (ntail,) = rd.unpack("<Q", "tail count")
    if ntail != counts[-1]:
        raise FormatError(f"tail count {ntail} disagrees with level count {counts[-1]}")
    width = (2 * k + 7) // 8
    tail = _tail_codes(rd.take(ntail * width, "tail codes"), ntail, k)
    remaining = len(data) - rd.pos
    if remaining < 8:
        raise FormatError("truncated file: length mismatch reading checksum")
    if remaining > 8:
        raise FormatError(f"trailing garbage: {remaining - 8} unexpected bytes")
    (stored,) = rd.unpack("<Q", "checksum")
    if stored != fnv1a64(data[:-8]):
        raise FormatError("checksum mismatch")
    if ntail:
        if max(tail) >= 1 << (2 * k):
            raise FormatError("tail code out of range for k")
        if ntail > 1 and not np.all(tail[1:] > tail[:-1]):
            raise FormatError("tail codes not strictly ascending")
    return CascadeIndex(k, t, bool(flags & FLAG_CANONICAL), levels, tail, counts)


def save_index(ix: CascadeIndex, sink: IO[bytes]) -> None:
    sink.write(index_to_bytes(ix))


def load_index(source: IO[bytes]) -> CascadeIndex:
    return index_from_bytes(source.read())


def save_index_file(ix: CascadeIndex, path: str | os.PathLike) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            save_index(ix, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_index_file(path: str | os.PathLike) -> CascadeIndex:
    with open(path, "rb") as fh:
        return load_index(fh)
