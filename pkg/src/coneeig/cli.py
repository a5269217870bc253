"""Command-line front end.

Subcommands::

    coneeig eig MATRIX.json [--k K | --all] [search/solver flags] [--format json|text]
    coneeig roots POLY.json  [--k K | --all] [search/solver flags] [--format json|text]
    coneeig bench [--count C] [--size N] [--range R] [--seed S] [search flags]

Exit status: 0 when every requested index verified, 1 when any failed,
2 on unreadable input or bad arguments. ``bench`` counts failures instead
of failing and exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, certificate
from .approx import SolverConfig
from .cone import EigenEnclosure, SearchConfig, VerifyConfig, verify_all
from .errors import ConeEigError, ParseError
from .formats import parse_matrix, parse_poly
from .polyroot import RootEnclosure, enclose_roots, normalize

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


def _positive_float(s):
    try:
        v = float(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from exc
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return v


def _add_search_flags(p):
    d = SearchConfig()
    g = p.add_argument_group("epsilon search")
    g.add_argument("--eps-start", type=_positive_float, default=d.eps_start)
    g.add_argument("--eps-min", type=_positive_float, default=d.eps_min)
    g.add_argument("--eps-max", type=_positive_float, default=d.eps_max)
    g.add_argument("--factor", type=_positive_float, default=d.factor, help="grid ratio, in (0, 1)")
    g.add_argument("--refine", action="store_true", help="bisect between the last pass and first fail")
    g.add_argument(
        "--no-tighten",
        dest="tighten_value",
        action="store_false",
        help="report the bare Rayleigh-quotient box for the eigenvalue",
    )
    s = p.add_argument_group("approximate eigensolver")
    s.add_argument("--solver", choices=("qr", "lapack"), default="qr")
    s.add_argument(
        "--native-scaling",
        action="store_true",
        help="keep the solver's own eigenvector scaling instead of unit max-norm",
    )
    s.add_argument(
        "--order",
        choices=("modulus", "solver"),
        default="modulus",
        help="index order: decreasing modulus, or as the solver returns them",
    )
    s.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $CONEEIG_THREADS or 1)")


def _add_io_flags(p, what):
    p.add_argument("file", help=f"{what} JSON file, or - for stdin")
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--k", type=int, help="verify only index K (1-based)")
    sel.add_argument("--all", action="store_true", help="verify every index (default)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("-o", "--output", help="write the certificate here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coneeig", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"coneeig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eig", help="enclose eigenpairs of a matrix")
    _add_io_flags(p, "matrix")
    _add_search_flags(p)

    p = sub.add_parser("roots", help="enclose roots of a polynomial (coefficients constant first)")
    _add_io_flags(p, "polynomial")
    _add_search_flags(p)

    p = sub.add_parser("bench", help="epsilon statistics over random matrices")
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--range", type=_positive_float, default=1.0, help="entries uniform in [-R, R]")
    p.add_argument("--complex", action="store_true", help="random imaginary parts as well")
    p.add_argument("--format", choices=("json", "text"), default="text")
    _add_search_flags(p)
    return parser


def config_from_args(args) -> VerifyConfig:
    search = SearchConfig(
        eps_start=args.eps_start,
        eps_min=args.eps_min,
        eps_max=args.eps_max,
        factor=args.factor,
        refine=args.refine,
        tighten_value=args.tighten_value,
    )
    solver = SolverConfig(
        seed=args.seed,
        method=args.solver,
        normalize="native" if args.native_scaling else "inf",
    )
    return VerifyConfig(search=search, solver=solver, order=args.order, threads=args.threads)


def _read(path) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _emit(doc, fmt, output):
    text = certificate.render_text(doc) if fmt == "text" else json.dumps(doc, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _indices(args, n):
    if args.k is None:
        return None
    if not 1 <= args.k <= n:
        raise ParseError(f"--k {args.k} outside 1..{n}")
    return [args.k - 1]


def cmd_eig(args, cfg) -> int:
    data = _read(args.file)
    a = parse_matrix(data.decode("utf-8"))
    results = verify_all(a, cfg, indices=_indices(args, a.rows))
    doc = certificate.build("eig", certificate.digest(data), a.rows, cfg, results)
    _emit(doc, args.format, args.output)
    return EXIT_OK if all(isinstance(r, EigenEnclosure) for r in results) else EXIT_FAILED


def cmd_roots(args, cfg) -> int:
    data = _read(args.file)
    p = normalize(parse_poly(data.decode("utf-8")))
    idx = _indices(args, p.degree)
    results = enclose_roots(p, cfg)
    if idx is not None:
        results = [results[i] for i in idx]
    doc = certificate.build("roots", certificate.digest(data), p.degree, cfg, results)
    _emit(doc, args.format, args.output)
    return EXIT_OK if all(isinstance(r, RootEnclosure) for r in results) else EXIT_FAILED


def bench(count, size, rng_range, seed, cfg, complex_entries=False, observer=None) -> dict:
    """Verify ``count`` random matrices; epsilon quartiles over verified pairs.

    Quartiles use linear interpolation between order statistics (numpy's
    default, Hyndman-Fan type 7). ``observer(a, results)`` is called for
    each matrix if given.
    """
    rng = np.random.default_rng(seed)
    eps, failed_pairs, verified_mats = [], 0, 0
    for _ in range(count):
        a = rng.uniform(-rng_range, rng_range, (size, size))
        if complex_entries:
            a = a + 1j * rng.uniform(-rng_range, rng_range, (size, size))
        res = verify_all(a, cfg)
        if observer is not None:
            observer(a, res)
        ok = [r.epsilon for r in res if isinstance(r, EigenEnclosure)]
        eps.extend(ok)
        failed_pairs += len(res) - len(ok)
        verified_mats += len(ok) == len(res)
    stats = None
    if eps:
        q = np.percentile(np.asarray(eps), [0, 25, 50, 75, 100])
        stats = dict(zip(("min", "q1", "median", "q3", "max"), (float(v) for v in q)))
    return {
        "tool": "coneeig",
        "version": __version__,
        "command": "bench",
        "count": count,
        "size": size,
        "range": rng_range,
        "seed": seed,
        "complex": complex_entries,
        "config": certificate.config_echo(cfg),
        "pairs_verified": len(eps),
        "pairs_failed": failed_pairs,
        "matrices_verified": verified_mats,
        "epsilon": stats,
    }


def render_bench(rep: dict) -> str:
    lines = [
        f"coneeig {rep['version']} bench: {rep['count']} matrices {rep['size']}x{rep['size']}, "
        f"entries in [-{rep['range']:g}, {rep['range']:g}]{' (complex)' if rep['complex'] else ''}, seed {rep['seed']}",
        f"matrices verified: {rep['matrices_verified']}/{rep['count']}",
        f"eigenpairs verified: {rep['pairs_verified']}, failed: {rep['pairs_failed']}",
    ]
    if rep["epsilon"]:
        for name, v in rep["epsilon"].items():
            lines.append(f"epsilon {name:>6}: {v:.6e}")
    return "\n".join(lines) + "\n"


def cmd_bench(args, cfg) -> int:
    if args.count < 0 or args.size < 1:
        raise ParseError("--count must be >= 0 and --size >= 1")
    rep = bench(args.count, args.size, args.range, args.seed, cfg, args.complex)
    out = render_bench(rep) if args.format == "text" else json.dumps(rep, indent=2) + "\n"
    sys.stdout.write(out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        handler = {"eig": cmd_eig, "roots": cmd_roots, "bench": cmd_bench}[args.command]
        return handler(args, cfg)
    except (ParseError, ConeEigError, ValueError, OSError, UnicodeDecodeError) as exc:
        print(f"coneeig: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
