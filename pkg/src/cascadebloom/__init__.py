"""Cascading Bloom filters for exact, compact k-mer set membership."""

from .bloom import BloomFilter
from .cascade import BuildStats, CascadeIndex, build_cascade
from .errors import (
    BuildError,
    CascadeBloomError,
    EncodingError,
    FormatError,
    KmerLengthError,
    ParameterError,
    QueryError,
    UnsupportedVersionError,
)
from .ingest import collect_kmers, load_index, read_fasta, save_index
from .kmer import (
    Kmer,
    KmerSet,
    canonical,
    decode,
    encode,
    kmers_of_sequence,
    neighbors,
    reverse_complement,
)
from .model import (
    INFINITE,
    bits_per_kmer_finite,
    bits_per_kmer_infinite,
    comparison_table,
    fp_rate,
    optimize_r,
    prior_method_bits,
)

__version__ = "0.1.0"
