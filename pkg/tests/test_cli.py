import io
import subprocess
import sys

import pytest

from cascadebloom.cli import main
from cascadebloom.kmer import Kmer, KmerSet, decode, sequence_codes
from cascadebloom.oracle import Oracle

from conftest import random_genome


def run(argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def parse_kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.fixture
def small_fasta(tmp_path):
    path = tmp_path / "a.fa"
    path.write_text(">a\nACGTACGT\n")
    return path


def test_build_reports_distinct_count(small_fasta, tmp_path):
    code, out = run(["build", "--k", "3", "-i", str(small_fasta), "-o", str(tmp_path / "a.cbf")])
    assert code == 0
    kv = parse_kv(out)
    assert kv["N"] == "4"
    assert kv["T0"] == "4"
    assert float(kv["bits_per_kmer"]) == pytest.approx(int(kv["total_bits"]) / 4, abs=1e-6)
    assert "model_bits_per_kmer" in kv


def test_build_auto_r(tmp_path):
    fa = tmp_path / "g.fa"
    fa.write_text(">g\n" + random_genome(5000, 1) + "\n")
    code, out = run(["build", "--k", "32", "--t", "4", "--r", "auto",
                     "-i", str(fa), "-o", str(tmp_path / "g.cbf")])
    assert code == 0
    assert float(parse_kv(out)["r"]) == pytest.approx(6.609087, abs=1e-2)


def test_build_missing_input(tmp_path):
    code, _ = run(["build", "--k", "3", "-i", str(tmp_path / "nope.fa"), "-o", str(tmp_path / "x")])
    assert code == 2
    assert not (tmp_path / "x").exists()


def test_build_bad_fasta_leaves_no_output(tmp_path):
    fa = tmp_path / "bad.fa"
    fa.write_text("ACGT\n")
    code, _ = run(["build", "--k", "3", "-i", str(fa), "-o", str(tmp_path / "x.cbf")])
    assert code == 1
    assert sorted(p.name for p in tmp_path.iterdir()) == ["bad.fa"]


@pytest.mark.parametrize("argv", [
    ["build", "--k", "0"],
    ["build", "--k", "3", "--t", "17"],
    ["build", "--k", "3", "--r", "-1"],
])
def test_build_parameter_errors(argv, small_fasta, tmp_path):
    out = tmp_path / "x.cbf"
    assert run(argv + ["-i", str(small_fasta), "-o", str(out)])[0] == 1
    assert not out.exists()


@pytest.mark.parametrize("argv", [["model", "--k", "x"], ["build", "--k", "3", "--r", "lots"]])
def test_argparse_errors_exit_1(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv + (["-i", "a", "-o", "b"] if argv[0] == "build" else []))
    assert exc.value.code == 1


def test_build_deterministic(small_fasta, tmp_path):
    a, b = tmp_path / "1.cbf", tmp_path / "2.cbf"
    run(["build", "--k", "3", "-i", str(small_fasta), "-o", str(a)])
    run(["build", "--k", "3", "-i", str(small_fasta), "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


@pytest.fixture
def built(tmp_path):
    seq = random_genome(20_000, 42)
    fa = tmp_path / "g.fa"
    fa.write_text(">g\n" + "\n".join(seq[i:i + 70] for i in range(0, len(seq), 70)) + "\n")
    ix = tmp_path / "g.cbf"
    code, out = run(["build", "--k", "15", "-i", str(fa), "-o", str(ix)])
    assert code == 0
    return seq, ix, out


def test_query_member_and_errors(built, monkeypatch):
    seq, ix, _ = built
    code, out = run(["query", "-x", str(ix)], stdin=f"{seq[:15]}\n{seq[:14]}\n\nACGTNACGTNACGTN\n",
                    monkeypatch=monkeypatch)
    assert code == 3
    assert out == f"{seq[:15]}\t1\n{seq[:14]}\tERR\nACGTNACGTNACGTN\tERR\n"


def test_query_all_valid_exit_0(built, monkeypatch):
    seq, ix, _ = built
    code, out = run(["query", "-x", str(ix)], stdin=seq[100:115] + "\n", monkeypatch=monkeypatch)
    assert code == 0 and out.endswith("\t1\n")


def test_query_restricted_domain_matches_oracle(built, tmp_path, monkeypatch):
    seq, ix, _ = built
    oracle = Oracle(KmerSet(15, sequence_codes(seq, 15)))
    domain = sorted(oracle.restricted_domain())
    lines = [decode(Kmer(15, c)) for c in domain]
    expected = "".join(f"{s}\t{int(c in oracle)}\n" for s, c in zip(lines, domain))
    code, out = run(["query", "-x", str(ix)], stdin="\n".join(lines) + "\n", monkeypatch=monkeypatch)
    assert code == 0
    assert out.encode() == expected.encode()


def test_query_unreadable_index(tmp_path, monkeypatch):
    code, _ = run(["query", "-x", str(tmp_path / "missing")], stdin="ACG\n", monkeypatch=monkeypatch)
    assert code == 2


def test_query_corrupt_index(tmp_path, monkeypatch):
    bad = tmp_path / "bad.cbf"
    bad.write_bytes(b"XXXX garbage")
    code, _ = run(["query", "-x", str(bad)], stdin="ACG\n", monkeypatch=monkeypatch)
    assert code == 1


def test_stats_matches_build(built):
    _, ix, build_out = built
    code, out = run(["stats", "-x", str(ix)])
    assert code == 0
    b, s = parse_kv(build_out), parse_kv(out)
    shared = set(b) & set(s)
    assert {"N", "T0", "B1_bits", "total_bits", "bits_per_kmer"} <= shared
    assert all(b[key] == s[key] for key in shared)
    assert float(s["bits_per_kmer"]) == pytest.approx(int(s["total_bits"]) / int(s["N"]), abs=1e-6)
    assert 0 < float(s["B1_fill"]) < 1


def test_stats_single_level(tmp_path):
    fa = tmp_path / "s.fa"
    fa.write_text(">s\nAAA\n")
    ix = tmp_path / "s.cbf"
    assert run(["build", "--k", "3", "--r", "64", "--seed", "1", "-i", str(fa), "-o", str(ix)])[0] == 0
    _, out = run(["stats", "-x", str(ix)])
    assert [line for line in out.splitlines() if line.startswith("B") and "_bits" in line] \
        == ["B1_bits=64"]


def test_model_single():
    code, out = run(["model", "--k", "16", "--t", "4"])
    assert code == 0
    r, bits = (float(part.split("=")[1]) for part in out.split())
    assert r == pytest.approx(6.447053, abs=1e-2)
    assert bits == pytest.approx(9.237855, abs=1e-4)


def test_model_infinite():
    code, out = run(["model", "--k", "21", "--t", "inf"])
    assert code == 0
    assert out.strip() == "r=6.299450 bits=9.188012"


def test_model_compare():
    code, out = run(["model", "--compare"])
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert rows[0] == ["k", "infinite_cascade", "cascade_t4", "prior_method"]
    reference = [(16, 9.18801, 9.237855, 12.0785), (32, 9.18801, 9.298095, 13.5185),
                 (64, 9.18801, 9.397210, 14.9585), (128, 9.18801, 9.548099, 16.3985)]
    assert len(rows) == 5
    for row, want in zip(rows[1:], reference):
        assert int(row[0]) == want[0]
        assert [float(v) for v in row[1:]] == pytest.approx(want[1:], abs=1e-3)


@pytest.mark.parametrize("argv", [["model", "--k", "0"], ["model"], ["model", "--k", "16", "--t", "0"]])
def test_model_parameter_errors(argv):
    assert run(argv)[0] == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cascadebloom", "model", "--k", "32", "--t", "4"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("r=6.609")
