"""Consistent satisfiability (key chase), endomorphisms, and query minimization."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Union

from .model import Atom, Const, Database, Query, Term, Var, canonical, homomorphisms, substitute

DEFAULT_ATOM_CAP = 8


class UnsatisfiableQueryError(ValueError):
    """Raised when minimizing a query that no consistent database satisfies."""


class MinimizationTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class Unsatisfiable:
    """Outcome of the key chase when two key-equal atoms carry clashing constants."""

    left: Atom
    right: Atom

    def __str__(self):
        return f"unsatisfiable: {self.left.format()} and {self.right.format()} clash"


def _unify(xs: Sequence[Term], ys: Sequence[Term]) -> Optional[Dict[Var, Term]]:
    theta: Dict[Var, Term] = {}
    for x, y in zip(xs, ys):
        x, y = substitute(x, theta), substitute(y, theta)
        if x == y:
            continue
        if isinstance(x, Var) and isinstance(y, Var):
            # keep the lexicographically smaller name
            old, new = (x, y) if y.name < x.name else (y, x)
        elif isinstance(x, Var):
            old, new = x, y
        elif isinstance(y, Var):
            old, new = y, x
        else:
            return None
        theta = {v: (new if t == old else t) for v, t in theta.items()}
        theta[old] = new
    return theta


def _first_key_clash(atoms: Sequence[Atom]):
    for i, a in enumerate(atoms):
        for b in atoms[i + 1 :]:
            if a.relation == b.relation and a.key == b.key:
                return a, b
    return None


def key_chase(q: Query) -> Union[Query, Unsatisfiable]:
    """Merge atoms that share relation and key, or report the first constant clash."""
    current = q
    while True:
        pair = _first_key_clash(current.sorted_atoms)
        if pair is None:
            return current
        a, b = pair
        theta = _unify(a.nonkey, b.nonkey)
        if theta is None:
            return Unsatisfiable(a, b)
        current = current.substitute(theta)


def is_consistently_satisfiable(q: Query) -> bool:
    return not isinstance(key_chase(q), Unsatisfiable)


def freeze(q: Query, prefix: str = "v#") -> Database:
    """Database obtained by mapping each variable to its own fresh constant."""
    theta = {v: Const(prefix + v.name) for v in q.variables}
    return Database((a.substitute(theta) for a in q.atoms), q.schema)


def endomorphisms(q: Query) -> Iterator[Dict[Var, Term]]:
    """All substitutions over vars(q) mapping q into itself, in a deterministic order."""
    return homomorphisms(q.atoms, q.atoms)


def _retraction(atoms: frozenset) -> Optional[frozenset]:
    """Image of a homomorphism from ``atoms`` into a proper subset, trying atoms in canonical order."""
    for dropped in canonical(atoms):
        rest = atoms - {dropped}
        theta = next(homomorphisms(atoms, rest), None)
        if theta is not None:
            return frozenset(a.substitute(theta) for a in atoms)
    return None


def has_key_sharing(q: Query) -> bool:
    return _first_key_clash(q.sorted_atoms) is not None


def is_minimal(q: Query) -> bool:
    if has_key_sharing(q):
        return False
    return _retraction(q.atoms) is None


def atom_cap() -> int:
    return int(os.environ.get("CQA_ATOM_CAP", DEFAULT_ATOM_CAP))


def minimize(q: Query, cap: Optional[int] = None) -> Query:
    """Key chase followed by contraction to a core.

    The result is satisfied by exactly the same consistent databases as ``q``
    (hence by the same repairs of any database).
    """
    cap = atom_cap() if cap is None else cap
    chased = key_chase(q)
    if isinstance(chased, Unsatisfiable):
        raise UnsatisfiableQueryError(str(chased))
    if len(chased) > cap:
        raise MinimizationTooLarge(f"query has {len(chased)} atoms after the chase; the cap is {cap}")
    atoms = chased.atoms
    while True:
        smaller = _retraction(atoms)
        if smaller is None:
            return chased.with_atoms(atoms)
        atoms = smaller
