"""Analytic memory model for cascading Bloom filters.

All quantities are bits per stored k-mer (the element count cancels).  A
filter with ``r`` bits per element has false-positive rate ``C ** r``.
``C`` is the rounded literal 0.6185 rather than ``2 ** -ln 2``.  Reference
optima such as r=6.447053 (t=4, k=16) only come out to the printed digits
with the rounded value.

The first level stores N members and faces about 8N neighbor queries.  So
the expected sizes of the stored sets run N, 8N c^r, N c^r, 8N c^2r, and so
on.  The tail set is stored explicitly at 2k bits per k-mer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

C = 0.6185
NEIGHBOR_FACTOR = 8
PRIOR_SLOPE = 1.44
PRIOR_OFFSET = 2.08
R_BOUNDS = (1.0, 40.0)
INFINITE = "infinite"

_INV_PHI = (math.sqrt(5) - 1) / 2


def _check_r(r: float) -> None:
    if not (isinstance(r, (int, float)) and r > 0 and math.isfinite(r)):
        raise ParameterError(f"r must be a positive finite number, got {r!r}")


def _check_tk(t: int, k: int) -> None:
    if not isinstance(t, int) or t < 1:
        raise ParameterError(f"t must be an integer >= 1, got {t!r}")
    if not isinstance(k, int) or k < 1:
        raise ParameterError(f"k must be an integer >= 1, got {k!r}")


def fp_rate(r: float) -> float:
    _check_r(r)
    return C ** r


def bits_per_kmer_infinite(r: float) -> float:
    """Cost of the untruncated cascade: ``(1 + 8c^r) r / (1 - c^r)``."""
    p = fp_rate(r)
    return (1 + NEIGHBOR_FACTOR * p) * r / (1 - p)


def level_factor(i: int, r: float) -> float:
    """Expected size of the set stored at 1-based level ``i``, per member."""
    if i % 2:
        return C ** (((i - 1) // 2) * r)
    return NEIGHBOR_FACTOR * C ** ((i // 2) * r)


def tail_factor(t: int, r: float) -> float:
    """Expected size of the explicit tail after ``t`` levels, per member."""
    p = C ** (math.ceil(t / 2) * r)
    return p if t % 2 == 0 else NEIGHBOR_FACTOR * p


def bits_per_kmer_finite(r: float, t: int, k: int) -> float:
    """Bitmaps for ``t`` levels plus a 2k-bit-per-k-mer tail."""
    _check_r(r)
    _check_tk(t, k)
    bitmaps = r * sum(level_factor(i, r) for i in range(1, t + 1))
    return bitmaps + 2 * k * tail_factor(t, r)


def golden_section(f, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Minimizer of a unimodal ``f`` on ``[lo, hi]`` to absolute ``tol``."""
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    return (a + b) / 2


def optimize_r(t: int | str, k: int = 1, tol: float = 1e-6) -> tuple[float, float]:
    """Bits-per-element ratio minimizing total space, and that minimum.

    Pass ``t=INFINITE`` for the untruncated cascade (``k`` is then unused).
    """
    if t == INFINITE:
        cost = bits_per_kmer_infinite
    else:
        _check_tk(t, k)

        def cost(r):
            return bits_per_kmer_finite(r, t, k)

    r = golden_section(cost, *R_BOUNDS, tol=tol)
    return r, cost(r)


@dataclass(frozen=True)
class MemoryModel:
    r: float
    t: int
    k: int
    c: float = C

    def __post_init__(self):
        _check_r(self.r)
        _check_tk(self.t, self.k)
        if self.c != C:
            raise ParameterError(f"the model constant is fixed at {C}")

    @property
    def bits_per_kmer(self) -> float:
        return bits_per_kmer_finite(self.r, self.t, self.k)

    def expected_counts(self, n: int) -> list[float]:
        """Expected sizes of T0..Tt for ``n`` members."""
        return [n * level_factor(i, self.r) for i in range(1, self.t + 1)] \
            + [n * tail_factor(self.t, self.r)]


def prior_method_bits(k: int) -> float:
    """Space of a single filter plus explicit false-positive table."""
    if not isinstance(k, int) or k < 1:
        raise ParameterError(f"k must be an integer >= 1, got {k!r}")
    return PRIOR_SLOPE * math.log2(16 * k / PRIOR_OFFSET) + PRIOR_OFFSET


@dataclass(frozen=True)
class ComparisonRow:
    k: int
    infinite_bits: float
    finite_r: float
    finite_bits: float
    prior_bits: float

    @property
    def saving(self) -> float:
        """Fractional saving of the finite cascade over the prior method."""
        return 1 - self.finite_bits / self.prior_bits


def comparison_table(ks, t: int = 4) -> list[ComparisonRow]:
    ks = list(ks)
    if not ks:
        raise ParameterError("need at least one k")
    _, inf_bits = optimize_r(INFINITE)
    rows = []
    for k in ks:
        r, bits = optimize_r(t, k)
        rows.append(ComparisonRow(k, inf_bits, r, bits, prior_method_bits(k)))
    return rows


def format_csv(rows: list[ComparisonRow], t: int = 4) -> str:
    lines = [f"k,infinite_cascade,cascade_t{t},prior_method"]
    for row in rows:
        lines.append(f"{row.k},{row.infinite_bits:.5f},{row.finite_bits:.6f},{row.prior_bits:.4f}")
    return "\n".join(lines) + "\n"
