"""Command-line entry point: ``cqa {classify,encode,minimize,count,verify,demo-flaw,se3}``.

Exit codes: 0 success, 1 usage or parse error, 2 precondition or resource limit.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from .classifier import NotCxQuery, NotSimpleKey, classify_skbcq, demonstrate_se3
from .encoder import MalformedEncodingError, SchemaError, new_encode, old_encode
from .flaw import demo_flaw
from .harness import run_verification
from .minimizer import MinimizationTooLarge, UnsatisfiableQueryError, minimize
from .qparse import ParseError, parse_database, parse_query, parse_schema, serialize
from .repairs import RepairSpaceTooLarge, count_satisfying

EXIT_USAGE = 1
EXIT_PRECONDITION = 2

PRECONDITION_ERRORS = (
    NotSimpleKey,
    NotCxQuery,
    MinimizationTooLarge,
    UnsatisfiableQueryError,
    RepairSpaceTooLarge,
    SchemaError,
    MalformedEncodingError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(source: str) -> str:
    """File contents if ``source`` names a file, otherwise ``source`` itself."""
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    if source.endswith((".cq", ".facts", ".schema")):
        raise UsageError(f"no such file: {source}")
    return source


def _query(args):
    schema = parse_schema(_read(args.schema)) if getattr(args, "schema", None) else None
    q = parse_query(_read(args.query), schema)
    return q, (None if schema is None else schema | q.schema)


def cmd_classify(args) -> int:
    q, schema = _query(args)
    result = classify_skbcq(q, schema, cap=args.atom_cap, mode="adjacent" if args.adjacent else "path")
    print(serialize(result, json_mode=args.json))
    return 0


def cmd_encode(args) -> int:
    q, schema = _query(args)
    encode = old_encode if args.old else new_encode
    print(serialize(encode(q, schema)))
    return 0


def cmd_minimize(args) -> int:
    q, _ = _query(args)
    print(serialize(minimize(q, cap=args.atom_cap)))
    return 0


def cmd_count(args) -> int:
    q = parse_query(_read(args.query))
    db = parse_database(_read(args.database))
    print(count_satisfying(db, q, cap=args.cap))
    return 0


def cmd_verify(args) -> int:
    report = run_verification(
        args.lemma, args.trials, args.seed, args.max_blocks, args.max_block_size, only=args.trial
    )
    print(report.render())
    return 0


def cmd_demo_flaw(args) -> int:
    print("\n".join(demo_flaw()))
    return 0


def cmd_se3(args) -> int:
    q, schema = _query(args)
    print(demonstrate_se3(q, schema, cap=args.atom_cap).render())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cqa", description="Classify and check #CQA for conjunctive queries under primary keys.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def query_command(name, func, help, schema=True):
        p = sub.add_parser(name, help=help)
        p.add_argument("query", help="query file (.cq) or inline query text")
        if schema:
            p.add_argument("--schema", help="file of 'rel NAME key K val M' declarations")
        p.set_defaults(func=func)
        return p

    p = query_command("classify", cmd_classify, "FP / #P-hard / trivially-zero verdict with trace")
    p.add_argument("--json", action="store_true", help="emit the classification as JSON")
    p.add_argument("--atom-cap", type=int, default=None, help="minimization cap (default 8, env CQA_ATOM_CAP)")
    p.add_argument("--adjacent", action="store_true", help="require the witness atoms to share a variable")

    p = query_command("encode", cmd_encode, "unirelational encoding of a query")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--new", action="store_true", help="pad non-key positions with fresh variables (default)")
    mode.add_argument("--old", action="store_true", help="pad non-key positions with zeros")

    p = query_command("minimize", cmd_minimize, "key chase followed by core computation", schema=False)
    p.add_argument("--atom-cap", type=int, default=None)

    p = query_command("se3", cmd_se3, "grounding steps replayed on the self-join-free rewrite")
    p.add_argument("--atom-cap", type=int, default=None)

    p = sub.add_parser("count", help="number of repairs satisfying the query (brute force)")
    p.add_argument("query")
    p.add_argument("database", help="database file (.facts) or inline facts")
    p.add_argument("--cap", type=int, default=None, help="maximum repairs to enumerate (default 10^6, env CQA_REPAIR_CAP)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="randomized count-preservation checks of the reductions")
    p.add_argument("--lemma", type=int, choices=(1, 2), required=True, help="1: couple reduction, 2: padding reduction")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-blocks", type=int, default=5)
    p.add_argument("--max-block-size", type=int, default=3)
    p.add_argument("--trial", type=int, default=None, help="rerun a single trial index")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-flaw", help="show why the zero-padded encoding cannot be inverted")
    p.set_defaults(func=cmd_demo_flaw)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
