"""Command line: build, verify, catalog, hom, pairs."""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .catalog import catalog_tsv, identify_cells
from .distributive import LAWS, mu_hat_uniqueness, verify_law
from .globular import Table, TableError, theta_hom
from .oracle import OracleScopeError, crosscheck_strict, strict_hom_count
from .report import counts_tsv, plot_catalog, plot_stage_counts, stage_counts
from .serialize import ParseError, parse_tower, serialize
from .soa import BoundExhausted, admissible_pairs, build_tower
from .terms import TermError
from .theory import FragmentBounds, MorphismError, base_theory

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

_LAW_ALIASES = {
    "unit-triangle": ("unit-triangle-left", "unit-triangle-right"),
    "pentagons": ("dist-pentagons",),
    "monad": ("monad-laws",),
    "hat-monad": ("hat-monad-laws",),
}


def _dim_bound(text: str) -> tuple:
    try:
        k, length, d = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K:LEN:DEPTH, got {text!r}") from None
    return (k, length, d)


def _table(text: str) -> Table:
    try:
        text = text.strip()
        return Table.parse(text if text.startswith("(") else f"({text})")
    except TableError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _indices(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_bounds(p: argparse.ArgumentParser, depth: int = 1, length: int = 3) -> None:
    g = p.add_argument_group("fragment bounds")
    g.add_argument("--max-arity-len", type=int, default=length, help="longest table of a pair arity")
    g.add_argument("--max-dim", type=int, default=2, help="largest replacement dimension")
    g.add_argument("--max-depth", type=int, default=depth, help="generator nesting depth of pair members")
    g.add_argument("--max-iter", type=int, default=2, help="one-step extensions per replacement")
    g.add_argument(
        "--dim-bound",
        type=_dim_bound,
        action="append",
        default=[],
        metavar="K:LEN:DEPTH",
        help="override arity length and depth for dimension-K pairs (repeatable)",
    )


def _bounds(args) -> FragmentBounds:
    return FragmentBounds(args.max_arity_len, args.max_dim, args.max_depth, args.max_iter, tuple(args.dim_bound))


def _tower(args):
    if getattr(args, "tower", None):
        with open(args.tower, encoding="utf-8") as fh:
            return parse_tower(fh.read())
    return build_tower(args.mode, args.stages, _bounds(args))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status(tower, stream=None) -> None:
    for tag, n, fix in tower.status:
        print(f"stage {n} {tag} {'fixpoint' if fix else 'bound'}", file=stream or sys.stderr)


def cmd_build(args) -> int:
    tower = build_tower(args.mode, args.stages, _bounds(args))
    _emit(serialize(tower), args.out)
    if args.out:
        _status(tower, sys.stdout)
    return EXIT_OK


def cmd_verify(args) -> int:
    flavor = "unique" if args.mode == "strict" else "free"
    b = _bounds(args)
    laws = _LAW_ALIASES.get(args.law, (args.law,))
    status = EXIT_OK
    for law in laws:
        if law == "mu-hat-uniqueness":
            (n_total,) = args.indices or (b.max_dim + 1,)
            rep = mu_hat_uniqueness(base_theory("strict" if flavor == "unique" else "weak"), n_total, b, flavor)
        else:
            params = args.indices
            if law == "completability" and len(params) == 1:
                params = (params[0], b.max_dim + 1)
            rep = verify_law(law, params, None, b, flavor)
        sys.stdout.write(rep.render(verbose=args.verbose))
        if rep.status == "FAIL":
            status = EXIT_FAIL
    return status


def cmd_catalog(args) -> int:
    tower = _tower(args)
    _status(tower)
    entries = identify_cells(tower, list_limit=args.list_limit)
    text = catalog_tsv(entries)
    _emit(text, args.out)
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        with open(os.path.join(args.figures, "catalog.tsv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        plot_catalog(entries, os.path.join(args.figures, "catalog.png"))
    return EXIT_OK


def cmd_hom(args) -> int:
    p = args.arity
    if args.target is not None:
        print(f"theta {p} {args.target} {len(theta_hom(p, args.target))}")
        return EXIT_OK
    if args.strict:
        print(f"oracle {p} {args.dim} {strict_hom_count(p, args.dim)}")
        if not args.tower and args.stages is None:
            return EXIT_OK
        tower = _tower(args)
        rep = crosscheck_strict(tower.last, p, args.dim, args.depth, tower.bounds)
        sys.stdout.write(rep.render(verbose=True))
        return EXIT_FAIL if rep.status == "FAIL" else EXIT_OK
    tower = _tower(args)
    _status(tower)
    rows = stage_counts(tower, [p], [args.dim], args.depth)
    text = counts_tsv(rows)
    sys.stdout.write(text)
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        with open(os.path.join(args.figures, "stage_counts.tsv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        plot_stage_counts(rows, os.path.join(args.figures, "stage_counts.png"), f"{p} -> {args.dim}, depth <= {args.depth}")
    return EXIT_OK


def cmd_pairs(args) -> int:
    b = _bounds(args)
    T = _tower(args).last if args.tower else base_theory()
    pairs = admissible_pairs(T, args.dim, b)
    for pr in pairs:
        print(f"{pr.arity}\t{pr.f}\t{pr.g}")
    print(f"# {len(pairs)} pairs", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coherator", description="Truncated coherator towers and their law checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a tower and print its serialization")
    b.add_argument("--mode", choices=("fc", "ic", "strict"), default="ic")
    b.add_argument("--stages", type=int, default=2)
    b.add_argument("--out", help="write the serialization here instead of standard output")
    _add_bounds(b)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="check a structural law on a bounded fragment")
    v.add_argument(
        "--law",
        required=True,
        choices=sorted(set(LAWS) | set(_LAW_ALIASES) | {"mu-hat-uniqueness"}),
    )
    v.add_argument("--indices", type=_indices, default=(), help="law indices, e.g. 0,1 or 0,1,2")
    v.add_argument("--mode", choices=("weak", "strict"), default="weak")
    v.add_argument("--verbose", action="store_true", help="also list passing generators")
    _add_bounds(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", help="tab-separated list of named and unnamed lifts")
    c.add_argument("--mode", choices=("fc", "ic", "strict"), default="ic")
    c.add_argument("--stages", type=int, default=2)
    c.add_argument("--tower", help="read a serialized tower instead of building one")
    c.add_argument("--out", help="write the table here instead of standard output")
    c.add_argument("--list-limit", type=int, default=5000, help="summarize layers larger than this")
    c.add_argument("--figures", help="directory for catalog.tsv and catalog.png")
    _add_bounds(c, depth=2, length=5)
    c.set_defaults(func=cmd_catalog)

    h = sub.add_parser("hom", help="count operations or strict cells over an arity")
    h.add_argument("--arity", type=_table, required=True)
    h.add_argument("--dim", type=int, default=0)
    h.add_argument("--target", type=_table, help="count globular maps arity -> target instead")
    h.add_argument("--strict", action="store_true", help="print the strict oracle count")
    h.add_argument("--mode", choices=("fc", "ic", "strict"), default="ic")
    h.add_argument("--stages", type=int, default=None)
    h.add_argument("--tower", help="read a serialized tower")
    h.add_argument("--depth", type=int, default=1)
    h.add_argument("--figures", help="directory for stage_counts.tsv and stage_counts.png")
    _add_bounds(h)
    h.set_defaults(func=cmd_hom)

    p = sub.add_parser("pairs", help="list admissible pairs of the base theory or a tower")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tower", help="read a serialized tower and use its last stage")
    _add_bounds(p)
    p.set_defaults(func=cmd_pairs)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "stages", None) is None and args.command == "hom" and not args.strict:
        args.stages = 2
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, TermError, MorphismError, BoundExhausted, OracleScopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
