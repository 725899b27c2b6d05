"""Command-line interface: build, query, stats, model.

Exit codes: 0 ok, 1 bad parameters or malformed input, 2 I/O failure,
3 some query lines could not be parsed.
"""

from __future__ import annotations

import argparse
import sys

from . import model
from .cascade import DEFAULT_SEED, DEFAULT_T, MAX_T, build_cascade
from .errors import CascadeBloomError, ParameterError
from .ingest import collect_kmers, load_index_file, read_fasta, save_index_file
from .kmer import MAX_K, as_codes, encode

EXIT_OK, EXIT_PARAM, EXIT_IO, EXIT_QUERY = 0, 1, 2, 3
COMPARE_KS = (16, 32, 64, 128)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _r_arg(value: str):
    if value == "auto":
        return value
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {value!r}")


def _t_arg(value: str):
    if value in ("inf", "infinite"):
        return model.INFINITE
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'inf', got {value!r}")


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise ParameterError(f"--k must be in [1, {MAX_K}], got {k}")


def _check_t(t: int) -> None:
    if not 1 <= t <= MAX_T:
        raise ParameterError(f"--t must be in [1, {MAX_T}], got {t}")


def cmd_build(args, out) -> int:
    _check_k(args.k)
    _check_t(args.t)
    r = args.r
    if r == "auto":
        r, _ = model.optimize_r(args.t, args.k)
    elif not r > 0:
        raise ParameterError(f"--r must be positive, got {r}")
    if args.input == "-":
        kmers = collect_kmers(read_fasta(sys.stdin.buffer), args.k, args.canonical)
    else:
        with open(args.input, "rb") as fh:
            kmers = collect_kmers(read_fasta(fh), args.k, args.canonical)
    ix = build_cascade(kmers, r, args.t, seed=args.seed)
    save_index_file(ix, args.output)

    print(f"k={ix.k}", f"t={ix.t}", f"r={r:.6f}", f"canonical={int(ix.canonical)}",
          f"seed={args.seed}", sep="\n", file=out)
    for line in ix.stats().lines():
        print(line, file=out)
    print(f"model_bits_per_kmer={model.bits_per_kmer_finite(r, args.t, args.k):.6f}", file=out)
    return EXIT_OK


def cmd_query(args, out) -> int:
    ix = load_index_file(args.index)
    lines = [line.strip() for line in sys.stdin]
    lines = [line for line in lines if line]
    codes, valid = [], []
    for i, line in enumerate(lines):
        try:
            x = encode(line)
        except CascadeBloomError:
            continue
        if x.k == ix.k:
            codes.append(x.code)
            valid.append(i)
    answers = [None] * len(lines)
    for i, hit in zip(valid, ix.query_codes(as_codes(codes, ix.k)).tolist()):
        answers[i] = "1" if hit else "0"
    failed = False
    for line, ans in zip(lines, answers):
        if ans is None:
            failed = True
            ans = "ERR"
        out.write(f"{line}\t{ans}\n")
    return EXIT_QUERY if failed else EXIT_OK


def cmd_stats(args, out) -> int:
    ix = load_index_file(args.index)
    print(f"k={ix.k}", f"t={ix.t}", f"canonical={int(ix.canonical)}", sep="\n", file=out)
    for line in ix.stats().lines():
        print(line, file=out)
    for i, f in enumerate(ix.levels, 1):
        print(f"B{i}_fill={f.fill_ratio():.6f}", file=out)
    return EXIT_OK


def cmd_model(args, out) -> int:
    t = args.t
    if t != model.INFINITE:
        _check_t(t)
    if args.compare:
        if t == model.INFINITE:
            raise ParameterError("--compare needs a finite --t")
        out.write(model.format_csv(model.comparison_table(COMPARE_KS, t), t))
        return EXIT_OK
    if args.k is None:
        raise ParameterError("model needs --k (or --compare)")
    _check_k(args.k)
    r, bits = model.optimize_r(t, args.k)
    print(f"r={r:.6f} bits={bits:.6f}", file=out)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cascadebloom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build an index from FASTA")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=DEFAULT_T)
    p.add_argument("--r", type=_r_arg, default="auto", help="bits per element, or 'auto'")
    p.add_argument("--canonical", action="store_true", help="merge reverse complements")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-i", dest="input", required=True, help="FASTA file ('-' for stdin)")
    p.add_argument("-o", dest="output", required=True, help="index file to write")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="query k-mers read from stdin, one per line")
    p.add_argument("-x", dest="index", required=True)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", help="print the stored index's sizes")
    p.add_argument("-x", dest="index", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("model", help="optimal r and bits per k-mer from the analytic model")
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=_t_arg, default=DEFAULT_T, help="level count, or 'inf'")
    p.add_argument("--compare", action="store_true", help="print the comparison table as CSV")
    p.set_defaults(func=cmd_model)
    return parser


def main(argv=None, out=None) -> int:
    args = make_parser().parse_args(argv)
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except CascadeBloomError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
