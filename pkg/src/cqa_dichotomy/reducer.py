"""Fact-level many-one reductions between counting problems.

``pad_*`` sends a database over the original schema to one over the single
encoding relation N. ``couple_*`` sends a database over the self-join-free
rewrite q' back to the relations of q, tagging every value with the query
term it sits under.
"""

from __future__ import annotations

from typing import Dict

from .encoder import EncodingContext, SchemaError, SelfJoinFreeRewrite
from .minimizer import has_key_sharing
from .model import Atom, Database, Query, RelConst, RelationSymbol, couple


class KeyTransferError(ValueError):
    """The source query has two atoms agreeing on relation and key."""


def pad_fact(fact: Atom, ctx: EncodingContext) -> Atom:
    try:
        ctx.check(fact.relation)
    except SchemaError as exc:
        raise SchemaError(f"{fact.format(ground=True)}: {exc}") from None
    rel = fact.relation
    key = (RelConst(rel.name),) + fact.key + ctx.key_padding(rel)
    nonkey = fact.nonkey + (ctx.zero,) * ctx.nonkey_padding_width(rel)
    return Atom(ctx.n_symbol, key, nonkey)


def pad_database(db: Database, ctx: EncodingContext) -> Database:
    return Database((pad_fact(f, ctx) for f in db.facts), [ctx.n_symbol])


def couple_fact(fact: Atom, atom: Atom, relation: RelationSymbol) -> Atom:
    """Map an R_i-fact to an R-fact whose j-th value is <a_j|x_j>."""
    if fact.relation != atom.relation:
        raise ValueError(f"{fact.format(ground=True)} is not a fact of {atom.relation.name}")
    if (relation.key_arity, relation.nonkey_arity) != (atom.relation.key_arity, atom.relation.nonkey_arity):
        raise ValueError(f"signature of {relation.name} differs from {atom.relation.name}")
    key = tuple(couple(a, x) for a, x in zip(fact.key, atom.key))
    nonkey = tuple(couple(a, x) for a, x in zip(fact.nonkey, atom.nonkey))
    return Atom(relation, key, nonkey)


def couple_database(db: Database, rewrite: SelfJoinFreeRewrite) -> Database:
    source = rewrite.origin
    original = Query(source.values())
    if has_key_sharing(original):
        raise KeyTransferError("source query has two atoms with the same relation and key")
    by_relation: Dict[RelationSymbol, Atom] = {a.relation: a for a in rewrite.query.atoms}
    out = []
    for fact in db.facts:
        atom = by_relation.get(fact.relation)
        if atom is None:
            raise ValueError(f"relation {fact.relation.name} has no atom in the rewritten query")
        out.append(couple_fact(fact, atom, source[atom].relation))
    return Database(out, original.schema)
