"""Unirelational encodings of conjunctive queries and the self-join-free rewrite.

Every atom R[x; y] becomes N['R',x,0..0; y,pad..] where N has one more key
position than the widest key in the schema and as many non-key positions as
the widest non-key part. The corrected encoding pads non-key positions with
fresh variables (``z#1``, ``z#2``, ...); the old one pads them with zeros.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union

from .model import (
    ZERO,
    Atom,
    Const,
    Database,
    Query,
    RelConst,
    RelationSymbol,
    Term,
    Var,
    canonical,
    schema_by_name,
)

PAD_VAR_RE = re.compile(r"z#(\d+)\Z")
RESERVED_ZERO = Const("#0")


class SchemaError(ValueError):
    pass


class MalformedEncodingError(ValueError):
    pass


@dataclass(frozen=True)
class EncodingContext:
    schema: frozenset
    k: int
    m: int
    n_symbol: RelationSymbol
    zero: Const = ZERO

    @classmethod
    def from_schema(cls, schema: Iterable[RelationSymbol], reserved_zero: bool = False) -> "EncodingContext":
        schema = frozenset(schema)
        if not schema:
            raise SchemaError("cannot encode over an empty schema")
        k = max(r.key_arity for r in schema)
        m = max(r.nonkey_arity for r in schema)
        names = {r.name for r in schema}
        name = "N"
        for i in itertools.count(1):
            if name not in names:
                break
            name = f"N#{i}"
        zero = RESERVED_ZERO if reserved_zero else ZERO
        return cls(schema, k, m, RelationSymbol(name, k + 1, m), zero)

    def relation(self, name: str) -> RelationSymbol:
        rel = schema_by_name(self.schema).get(name)
        if rel is None:
            raise SchemaError(f"relation {name} is not in the schema")
        return rel

    def check(self, rel: RelationSymbol) -> None:
        if self.relation(rel.name) != rel:
            raise SchemaError(f"relation {rel.name} does not match its schema signature")

    def key_padding(self, rel: RelationSymbol) -> Tuple[Term, ...]:
        return (self.zero,) * (self.k - rel.key_arity)

    def nonkey_padding_width(self, rel: RelationSymbol) -> int:
        return self.m - rel.nonkey_arity


def _context(q: Query, schema) -> EncodingContext:
    if isinstance(schema, EncodingContext):
        return schema
    return EncodingContext.from_schema(q.schema if schema is None else schema)


def _fresh_padding_vars(q: Query) -> Iterator[Var]:
    used = [int(m.group(1)) for v in q.variables if (m := PAD_VAR_RE.match(v.name))]
    start = max(used, default=0) + 1
    return (Var(f"z#{i}") for i in itertools.count(start))


def encode_with_origin(
    q: Query, schema=None, fresh_padding: bool = True
) -> List[Tuple[Atom, Atom]]:
    """(source atom, encoded atom) pairs in canonical source order."""
    ctx = _context(q, schema)
    fresh = _fresh_padding_vars(q)
    pairs = []
    for atom in q.sorted_atoms:
        ctx.check(atom.relation)
        width = ctx.nonkey_padding_width(atom.relation)
        pad = tuple(next(fresh) for _ in range(width)) if fresh_padding else (ctx.zero,) * width
        key = (RelConst(atom.relation.name),) + atom.key + ctx.key_padding(atom.relation)
        pairs.append((atom, Atom(ctx.n_symbol, key, atom.nonkey + pad)))
    return pairs


def new_encode(q: Query, schema=None) -> Query:
    """Corrected encoding: non-key padding with pairwise distinct fresh variables."""
    ctx = _context(q, schema)
    return Query((e for _, e in encode_with_origin(q, ctx, True)), [ctx.n_symbol])


def old_encode(q: Query, schema=None) -> Query:
    """Original encoding: non-key padding with zeros."""
    ctx = _context(q, schema)
    return Query((e for _, e in encode_with_origin(q, ctx, False)), [ctx.n_symbol])


@dataclass(frozen=True)
class NoPreimage:
    witness: Atom
    reason: str

    def __str__(self):
        return f"NoPreimage: {self.witness.format(ground=True)}"


def invert_old_encode(db: Database, schema) -> Union[Database, NoPreimage]:
    """The database over ``schema`` whose zero-padded image is ``db``, if one exists."""
    ctx = schema if isinstance(schema, EncodingContext) else EncodingContext.from_schema(schema)
    out = []
    for fact in canonical(db.facts):
        if fact.relation != ctx.n_symbol:
            raise MalformedEncodingError(f"{fact.format(ground=True)} is not a {ctx.n_symbol.name}-fact")
        head = fact.key[0]
        if not isinstance(head, RelConst):
            raise MalformedEncodingError(f"first key position of {fact.format(ground=True)} is not a relation name")
        try:
            rel = ctx.relation(head.name)
        except SchemaError as exc:
            raise MalformedEncodingError(str(exc)) from None
        key, key_pad = fact.key[1 : 1 + rel.key_arity], fact.key[1 + rel.key_arity :]
        nonkey, nonkey_pad = fact.nonkey[: rel.nonkey_arity], fact.nonkey[rel.nonkey_arity :]
        for where, pad in (("key", key_pad), ("non-key", nonkey_pad)):
            bad = next((t for t in pad if t != ctx.zero), None)
            if bad is not None:
                return NoPreimage(fact, f"{where} padding position holds {bad}, expected {ctx.zero}")
        out.append(Atom(rel, key, nonkey))
    return Database(out, ctx.schema)


class SelfJoinFreeRewrite(NamedTuple):
    query: Query
    origin: Dict[Atom, Atom]

    def atom_for(self, source: Atom) -> Atom:
        for new, old in self.origin.items():
            if old == source:
                return new
        raise KeyError(source)


def selfjoinfree_rewrite(q: Query) -> SelfJoinFreeRewrite:
    """Give every atom its own relation R#1, R#2, ... numbered in canonical atom order."""
    counters: Dict[str, int] = {}
    origin: Dict[Atom, Atom] = {}
    for atom in q.sorted_atoms:
        rel = atom.relation
        counters[rel.name] = counters.get(rel.name, 0) + 1
        fresh = RelationSymbol(f"{rel.name}#{counters[rel.name]}", rel.key_arity, rel.nonkey_arity)
        origin[Atom(fresh, atom.key, atom.nonkey)] = atom
    return SelfJoinFreeRewrite(Query(origin), origin)
