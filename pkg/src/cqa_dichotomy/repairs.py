"""Brute-force repair enumeration and #CQA counting (the ground-truth oracle)."""

from __future__ import annotations

import itertools
import math
import os
from typing import Dict, Iterator, List, Optional, Tuple

from .model import Atom, Database, Query, RelationSymbol, Term, canonical, homomorphisms

DEFAULT_REPAIR_CAP = 10**6

BlockKey = Tuple[RelationSymbol, Tuple[Term, ...]]


class RepairSpaceTooLarge(RuntimeError):
    pass


def default_cap() -> int:
    return int(os.environ.get("CQA_REPAIR_CAP", DEFAULT_REPAIR_CAP))


def blocks(db: Database) -> Dict[BlockKey, Tuple[Atom, ...]]:
    """Partition of ``db`` into maximal sets of key-equal facts, canonically ordered."""
    grouped: Dict[BlockKey, List[Atom]] = {}
    for fact in canonical(db.facts):
        grouped.setdefault((fact.relation, fact.key), []).append(fact)
    # facts are already canonical, so the first fact orders the blocks
    return {k: tuple(v) for k, v in sorted(grouped.items(), key=lambda kv: kv[1][0].sort_key)}


def num_repairs(db: Database) -> int:
    return math.prod(len(b) for b in blocks(db).values())


def _choices(db: Database, cap: Optional[int]) -> List[Tuple[Atom, ...]]:
    cap = default_cap() if cap is None else cap
    parts = list(blocks(db).values())
    size = math.prod(len(b) for b in parts)
    if size > cap:
        raise RepairSpaceTooLarge(f"{size} repairs exceed the cap of {cap}")
    return parts


def repair_tuples(db: Database, cap: Optional[int] = None) -> Iterator[Tuple[Atom, ...]]:
    """Repairs as tuples of facts, one per block, in mixed-radix order (last block fastest)."""
    return itertools.product(*_choices(db, cap))


def repairs(db: Database, cap: Optional[int] = None) -> Iterator[Database]:
    for choice in repair_tuples(db, cap):
        yield Database(choice, db.schema)


def count_satisfying(db: Database, q: Query, cap: Optional[int] = None) -> int:
    """Number of repairs of ``db`` that satisfy ``q``."""
    atoms = q.atoms
    return sum(
        1 for choice in repair_tuples(db, cap) if next(homomorphisms(atoms, choice), None) is not None
    )
