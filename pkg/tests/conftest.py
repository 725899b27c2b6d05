import numpy as np
import pytest

from cascadebloom.kmer import KmerSet, sequence_codes

import acceptance_log


def random_genome(length: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    return "".join(np.array(list("ACGT"))[rng.integers(0, 4, length)])


def genome_kmers(length: int, seed: int, k: int, canonical: bool = False) -> KmerSet:
    return KmerSet(k, sequence_codes(random_genome(length, seed), k), canonical)


@pytest.fixture(scope="session")
def genome_50kb():
    return random_genome(50_000, 50)


@pytest.fixture(scope="session")
def genome_100kb():
    return random_genome(100_000, 100)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.RESULTS:
            terminalreporter.write_line(line)
