"""Command-line entry point: search, verify, scan, graph export and flattening curves.

Exit codes: 0 success, 2 search exhausted, 3 precondition violated, 64 usage.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from . import cosetgraph, pipeline, spectral, walk
from .errors import DomainError
from .subgroups import SearchExhausted

EXIT_OK = 0
EXIT_EXHAUSTED = 2
EXIT_PRECONDITION = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def dense_cap_default() -> int:
    return int(os.environ.get("BICOSET_DENSE_CAP", spectral.DEFAULT_DENSE_CAP))


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _settings(args) -> pipeline.Settings:
    return pipeline.Settings(mode=args.mode, l1=args.l1, l2=args.l2, tol=args.tol, max_iter=args.max_iter,
                             dense_cap=args.dense_cap, bfs_cap=args.bfs_cap, steps=args.steps,
                             coset_l=args.coset_l, seed=args.seed)


def _dump(obj, path) -> None:
    with _output(path) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_search(args) -> int:
    cert, info = pipeline.resolve_certificate(args.p, args.d, None, _settings(args))
    _dump({"certificate": cert.to_dict(), "search": info}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = pipeline.verify(args.p, args.d, args.x, _settings(args))
    _dump(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    s = _settings(args)
    rows = []
    for p in pipeline.scan_primes(args.d, args.p_min, args.p_max):
        rows.append(pipeline.scan_row(p, args.d, s))
        print(f"p={p} done", file=sys.stderr)
    with _output(args.out) as fh:
        pipeline.write_scan(rows, fh)
    return EXIT_OK


def cmd_graph(args) -> int:
    cert, _ = pipeline.resolve_certificate(args.p, args.d, args.x, _settings(args))
    graph = cosetgraph.build_graph(cert)
    with _output(args.out) as fh:
        graph.write_edge_list(fh)
    return EXIT_OK


def cmd_flatten(args) -> int:
    cert, _ = pipeline.resolve_certificate(args.p, args.d, args.x, _settings(args))
    curve = walk.flattening_curve(cert, args.steps)
    with _output(args.out) as fh:
        curve.write_csv(fh)
    print(f"mix_step={curve.mix_step}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bicoset", description="Bipartite coset graphs of PSL_2(F_p): search, girth, spectra.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, need_p=True):
        if need_p:
            sp.add_argument("--p", type=int, required=True, help="prime, p >= 5")
        sp.add_argument("--d", type=int, required=True, help="subgroup order, d | (p+1)/2")
        sp.add_argument("--mode", choices=("sieve", "scan", "random"), default="sieve")
        sp.add_argument("--l1", type=int, default=None, help="loop-free depth (default from p, d)")
        sp.add_argument("--l2", type=int, default=None, help="word-check depth (default from p, d)")
        sp.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
        sp.add_argument("--max-iter", type=int, default=spectral.DEFAULT_MAX_ITER)
        sp.add_argument("--dense-cap", type=int, default=dense_cap_default())
        sp.add_argument("--bfs-cap", type=int, default=cosetgraph.DEFAULT_BFS_CAP)
        sp.add_argument("--steps", type=int, default=100, help="flattening curve length")
        sp.add_argument("--coset-l", type=int, default=10, help="walk length for the coset-mass check")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1, help="accepted for compatibility; runs single-threaded")
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("search", help="find x and print the pair certificate as JSON")
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("verify", help="run every check and print a JSON report")
    common(sp)
    sp.add_argument("--x", type=int, default=None, help="skip the search and use this x")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("scan", help="CSV table over all admissible primes in a range")
    common(sp, need_p=False)
    sp.add_argument("--p-min", type=int, required=True)
    sp.add_argument("--p-max", type=int, required=True)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("graph", help="export the coset graph as an edge list")
    common(sp)
    sp.add_argument("--x", type=int, default=None)
    sp.set_defaults(func=cmd_graph)

    sp = sub.add_parser("flatten", help="CSV of the L2 norms of convolution powers of S0")
    common(sp)
    sp.add_argument("--x", type=int, default=None)
    sp.set_defaults(func=cmd_flatten)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SearchExhausted as exc:
        print(json.dumps({"error": str(exc), "census": exc.census}), file=sys.stderr)
        return EXIT_EXHAUSTED
    except DomainError as exc:
        print(f"bicoset: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
