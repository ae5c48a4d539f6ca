"""Terms, atoms, queries and databases for Boolean conjunctive queries under primary keys.

Everything here is an immutable value. Atoms carry their relation symbol
(name plus key/non-key arity), so two atoms are equal only when their
signatures agree as well.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

VAR_RE = re.compile(r"[a-z_][A-Za-z0-9_#]*\Z")
NUMBER_RE = re.compile(r"[0-9][A-Za-z0-9_#.]*\Z")
RELATION_RE = re.compile(r"[A-Z][A-Za-z0-9_#]*\Z")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not VAR_RE.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """A data constant. ``Const("0")`` doubles as the padding zero."""

    value: str

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class RelConst:
    """A relation name used as a constant (first key position of encoded atoms)."""

    name: str

    def __post_init__(self):
        if not RELATION_RE.match(self.name):
            raise ValueError(f"invalid relation name {self.name!r}")

    def __str__(self):
        return f"'{self.name}'"


@dataclass(frozen=True)
class Couple:
    """The constant <left|right> pairing a data constant with a query term.

    Build these through :func:`couple`; a couple whose coordinates are the same
    constant is not a valid value (it is that constant).
    """

    left: "Constant"
    right: "Term"

    def __post_init__(self):
        if isinstance(self.left, Var):
            raise ValueError("left coordinate of a couple must be a constant")
        if self.left == self.right:
            raise ValueError(f"<{self.left}|{self.right}> must collapse to {self.left}")

    def __str__(self):
        return format_term(self)


Constant = Union[Const, RelConst, Couple]
Term = Union[Var, Const, RelConst, Couple]
Substitution = Mapping[Var, Term]

ZERO = Const("0")


def couple(left: Constant, right: Term) -> Constant:
    if left == right:
        return left
    return Couple(left, right)


def is_var(term: Term) -> bool:
    return isinstance(term, Var)


def format_term(term: Term, ground: bool = False) -> str:
    """Render a term in the text syntax.

    In query context bare lowercase identifiers are variables, so symbolic
    constants are double-quoted. In ground (fact) context they print bare.
    The right coordinate of a couple is always a query term.
    """
    if isinstance(term, Var):
        return term.name
    if isinstance(term, RelConst):
        return f"'{term.name}'"
    if isinstance(term, Couple):
        return f"<{format_term(term.left, ground)}|{format_term(term.right, False)}>"
    if NUMBER_RE.match(term.value) or (ground and VAR_RE.match(term.value)):
        return term.value
    return json.dumps(term.value)


def substitute(term: Term, theta: Substitution) -> Term:
    if isinstance(term, Var):
        return theta.get(term, term)
    return term


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    key_arity: int
    nonkey_arity: int

    def __post_init__(self):
        if not RELATION_RE.match(self.name):
            raise ValueError(f"invalid relation name {self.name!r}")
        if self.key_arity < 1:
            raise ValueError(f"{self.name}: key arity must be at least 1")
        if self.nonkey_arity < 0:
            raise ValueError(f"{self.name}: negative non-key arity")

    @property
    def arity(self) -> int:
        return self.key_arity + self.nonkey_arity

    @property
    def is_simple_key(self) -> bool:
        return self.key_arity == 1

    def __str__(self):
        return f"rel {self.name} key {self.key_arity} val {self.nonkey_arity}"


@dataclass(frozen=True)
class Atom:
    relation: RelationSymbol
    key: Tuple[Term, ...]
    nonkey: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "key", tuple(self.key))
        object.__setattr__(self, "nonkey", tuple(self.nonkey))
        if len(self.key) != self.relation.key_arity or len(self.nonkey) != self.relation.nonkey_arity:
            raise ValueError(
                f"{self.relation.name} expects {self.relation.key_arity} key and "
                f"{self.relation.nonkey_arity} non-key terms, got {len(self.key)} and {len(self.nonkey)}"
            )

    @property
    def terms(self) -> Tuple[Term, ...]:
        return self.key + self.nonkey

    @cached_property
    def variables(self) -> frozenset:
        return frozenset(t for t in self.terms if isinstance(t, Var))

    @property
    def is_ground(self) -> bool:
        return not self.variables

    def substitute(self, theta: Substitution) -> "Atom":
        if not theta:
            return self
        return Atom(
            self.relation,
            tuple(substitute(t, theta) for t in self.key),
            tuple(substitute(t, theta) for t in self.nonkey),
        )

    def format(self, ground: bool = False) -> str:
        key = ",".join(format_term(t, ground) for t in self.key)
        nonkey = ",".join(format_term(t, ground) for t in self.nonkey)
        return f"{self.relation.name}[{key}; {nonkey}]" if nonkey else f"{self.relation.name}[{key};]"

    @cached_property
    def sort_key(self) -> str:
        return self.format()

    def __str__(self):
        return self.format(ground=self.is_ground)


# Facts are ground atoms; Database enforces groundness.
Fact = Atom


def key_equal(a: Atom, b: Atom) -> bool:
    return a.relation == b.relation and a.key == b.key


def canonical(atoms: Iterable[Atom]) -> List[Atom]:
    return sorted(atoms, key=lambda a: a.sort_key)


def _check_schema(schema: frozenset, atoms: Iterable[Atom]) -> None:
    names: Dict[str, RelationSymbol] = {}
    for rel in schema:
        if rel.name in names:
            raise ValueError(f"relation {rel.name} declared twice with different signatures")
        names[rel.name] = rel
    for atom in atoms:
        if names.get(atom.relation.name) != atom.relation:
            raise ValueError(f"relation {atom.relation.name} of {atom} is not in the schema")


@dataclass(frozen=True, init=False)
class Query:
    """A Boolean conjunctive query: a finite set of atoms over a schema."""

    atoms: frozenset
    schema: frozenset

    def __init__(self, atoms: Iterable[Atom] = (), schema: Optional[Iterable[RelationSymbol]] = None):
        atoms = frozenset(atoms)
        schema = frozenset(a.relation for a in atoms) if schema is None else frozenset(schema)
        _check_schema(schema, atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "schema", schema)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.sorted_atoms)

    def __contains__(self, atom):
        return atom in self.atoms

    @cached_property
    def sorted_atoms(self) -> Tuple[Atom, ...]:
        return tuple(canonical(self.atoms))

    @cached_property
    def variables(self) -> frozenset:
        return frozenset().union(*(a.variables for a in self.atoms))

    @property
    def constants(self) -> frozenset:
        return frozenset(t for a in self.atoms for t in a.terms if not isinstance(t, Var))

    @property
    def relations(self) -> frozenset:
        return frozenset(a.relation for a in self.atoms)

    @property
    def is_self_join_free(self) -> bool:
        return len(self.relations) == len(self.atoms)

    @property
    def is_unirelational(self) -> bool:
        return len(self.relations) <= 1

    def substitute(self, theta: Substitution) -> "Query":
        return Query((a.substitute(theta) for a in self.atoms), self.schema)

    def with_atoms(self, atoms: Iterable[Atom]) -> "Query":
        return Query(atoms, self.schema)

    def __str__(self):
        return ", ".join(a.format() for a in self.sorted_atoms)


@dataclass(frozen=True, init=False)
class Database:
    facts: frozenset
    schema: frozenset

    def __init__(self, facts: Iterable[Atom] = (), schema: Optional[Iterable[RelationSymbol]] = None):
        facts = frozenset(facts)
        for f in facts:
            if not f.is_ground:
                raise ValueError(f"fact {f.format()} is not ground")
        schema = frozenset(f.relation for f in facts) if schema is None else frozenset(schema)
        _check_schema(schema, facts)
        object.__setattr__(self, "facts", facts)
        object.__setattr__(self, "schema", schema)

    def __len__(self):
        return len(self.facts)

    def __iter__(self) -> Iterator[Atom]:
        return iter(canonical(self.facts))

    def __contains__(self, fact):
        return fact in self.facts

    @property
    def is_consistent(self) -> bool:
        keys = {(f.relation, f.key) for f in self.facts}
        return len(keys) == len(self.facts)

    def __str__(self):
        return "\n".join(f.format(ground=True) for f in self)


def schema_by_name(schema: Iterable[RelationSymbol]) -> Dict[str, RelationSymbol]:
    return {r.name: r for r in schema}


# -- homomorphisms and evaluation ------------------------------------------------


def _order_atoms(atoms: Sequence[Atom], index: Mapping[RelationSymbol, list]) -> List[Atom]:
    """Fewest candidates first, then prefer atoms sharing variables with those placed."""
    remaining = list(atoms)
    ordered: List[Atom] = []
    bound: set = set()
    while remaining:
        best = min(
            remaining,
            key=lambda a: (not (a.variables & bound) and bool(bound), len(index.get(a.relation, ())), a.sort_key),
        )
        remaining.remove(best)
        ordered.append(best)
        bound |= best.variables
    return ordered


def _match(atom: Atom, target: Atom, theta: Dict[Var, Term]) -> Optional[List[Var]]:
    """Extend ``theta`` in place so that atom maps onto target; return new bindings or None."""
    added: List[Var] = []
    for s, t in zip(atom.terms, target.terms):
        if isinstance(s, Var):
            bound = theta.get(s)
            if bound is None:
                theta[s] = t
                added.append(s)
            elif bound != t:
                break
        elif s != t:
            break
    else:
        return added
    for v in added:
        del theta[v]
    return None


def homomorphisms(
    atoms: Iterable[Atom], target: Iterable[Atom], partial: Optional[Substitution] = None
) -> Iterator[Dict[Var, Term]]:
    """Yield every substitution over the variables of ``atoms`` mapping them into ``target``.

    Terms of ``target`` are treated as opaque values, so this serves both query
    evaluation (target a database) and endomorphism search (target a query).
    Each yielded dict is a fresh copy.
    """
    index: Dict[RelationSymbol, list] = {}
    for t in canonical(target):
        index.setdefault(t.relation, []).append(t)
    ordered = _order_atoms(list(canonical(atoms)), index)
    theta: Dict[Var, Term] = dict(partial or {})

    def search(i: int) -> Iterator[Dict[Var, Term]]:
        if i == len(ordered):
            yield dict(theta)
            return
        for candidate in index.get(ordered[i].relation, ()):
            added = _match(ordered[i], candidate, theta)
            if added is None:
                continue
            yield from search(i + 1)
            for v in added:
                del theta[v]

    return search(0)


def evaluate(q: Query, db: Union[Database, Iterable[Atom]]) -> bool:
    """True iff some valuation maps every atom of ``q`` into ``db``."""
    facts = db.facts if isinstance(db, Database) else db
    return next(homomorphisms(q.atoms, facts), None) is not None


# -- structural views --------------------------------------------------------------


def occurrence_counts(q: Query) -> Dict[Var, int]:
    counts: Dict[Var, int] = {}
    for atom in q.atoms:
        for t in atom.terms:
            if isinstance(t, Var):
                counts[t] = counts.get(t, 0) + 1
    return counts


def complex_part(q: Query) -> frozenset:
    """Atoms with a constant, or a variable occurring twice or more in ``q``, at a non-key position."""
    counts = occurrence_counts(q)
    return frozenset(
        a for a in q.atoms if any(not isinstance(t, Var) or counts[t] >= 2 for t in a.nonkey)
    )


def intersection_graph(q: Query) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(q.sorted_atoms)
    atoms = q.sorted_atoms
    for i, a in enumerate(atoms):
        for b in atoms[i + 1 :]:
            if a.variables & b.variables:
                g.add_edge(a, b)
    return g


def connected(q: Query, f1: Atom, f2: Atom, mode: str = "path") -> bool:
    """Whether f1 and f2 are connected in the intersection graph of ``q``.

    ``mode="path"`` (default) asks for reachability, ``mode="adjacent"`` for a direct edge.
    """
    for f in (f1, f2):
        if f not in q.atoms:
            raise ValueError(f"{f.format()} is not an atom of the query")
    if f1 == f2:
        return True
    if mode == "adjacent":
        return bool(f1.variables & f2.variables)
    if mode != "path":
        raise ValueError(f"unknown connectivity mode {mode!r}")
    return nx.has_path(intersection_graph(q), f1, f2)
