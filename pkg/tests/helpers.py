"""Brute-force oracles and hypothesis strategies shared by the test modules.

The oracles here deliberately avoid the library's search code: they enumerate
every valuation or every subset outright.
"""

import itertools

from hypothesis import strategies as st

from cqa_dichotomy.model import Atom, Const, Database, Query, RelConst, RelationSymbol, Var, couple

VARS = [Var(n) for n in ("x", "y", "z", "u")]
CONSTS = [Const(c) for c in ("0", "1", "a", "b")]


def apply(theta, atom):
    return atom.substitute(theta)


def brute_evaluate(q, facts):
    facts = set(facts)
    variables = sorted(q.variables, key=lambda v: v.name)
    values = {t for f in facts for t in f.terms}
    for image in itertools.product(values, repeat=len(variables)):
        theta = dict(zip(variables, image))
        if all(apply(theta, a) in facts for a in q.atoms):
            return True
    return not q.atoms


def brute_endomorphisms(q):
    variables = sorted(q.variables, key=lambda v: v.name)
    terms = {t for a in q.atoms for t in a.terms}
    out = []
    for image in itertools.product(terms, repeat=len(variables)):
        theta = dict(zip(variables, image))
        if all(apply(theta, a) in q.atoms for a in q.atoms):
            out.append(theta)
    return out


def brute_is_minimal(q):
    atoms = list(q.atoms)
    for a, b in itertools.combinations(atoms, 2):
        if a.relation == b.relation and a.key == b.key:
            return False
    return all(len({apply(t, a) for a in atoms}) == len(atoms) for t in brute_endomorphisms(q))


def brute_repairs(db):
    """Maximal consistent subsets by subset enumeration."""
    facts = sorted(db.facts, key=lambda f: f.sort_key)

    def consistent(s):
        return len({(f.relation, f.key) for f in s}) == len(s)

    subsets = [frozenset(c) for n in range(len(facts) + 1) for c in itertools.combinations(facts, n) if consistent(c)]
    return [s for s in subsets if not any(s < t for t in subsets)]


def brute_count(db, q):
    return sum(1 for r in brute_repairs(db) if brute_evaluate(q, r))


# -- strategies -------------------------------------------------------------------

R11 = RelationSymbol("R", 1, 1)
S10 = RelationSymbol("S", 1, 0)
T12 = RelationSymbol("T", 1, 2)
U21 = RelationSymbol("U", 2, 1)
SMALL_SCHEMA = (R11, S10, T12, U21)


@st.composite
def atoms(draw, relations=SMALL_SCHEMA, terms=tuple(VARS + CONSTS)):
    rel = draw(st.sampled_from(relations))
    t = st.sampled_from(terms)
    key = tuple(draw(t) for _ in range(rel.key_arity))
    nonkey = tuple(draw(t) for _ in range(rel.nonkey_arity))
    return Atom(rel, key, nonkey)


@st.composite
def queries(draw, relations=SMALL_SCHEMA, max_atoms=4, const_weight=0.2):
    terms = st.one_of(st.sampled_from(VARS), st.sampled_from(CONSTS)) if const_weight else st.sampled_from(VARS)
    n = draw(st.integers(1, max_atoms))
    out = []
    for _ in range(n):
        rel = draw(st.sampled_from(relations))
        out.append(Atom(rel, tuple(draw(terms) for _ in range(rel.key_arity)), tuple(draw(terms) for _ in range(rel.nonkey_arity))))
    return Query(out)


@st.composite
def databases(draw, relations=SMALL_SCHEMA, max_facts=7, values=tuple(CONSTS)):
    n = draw(st.integers(0, max_facts))
    v = st.sampled_from(values)
    facts = []
    for _ in range(n):
        rel = draw(st.sampled_from(relations))
        facts.append(Atom(rel, tuple(draw(v) for _ in range(rel.key_arity)), tuple(draw(v) for _ in range(rel.nonkey_arity))))
    return Database(facts, relations)


def rich_constants():
    base = st.one_of(
        st.sampled_from(CONSTS),
        st.text(alphabet="abcXYZ019_# -\"'\\", max_size=5).map(Const),
        st.sampled_from(["R", "S", "N"]).map(RelConst),
    )
    return st.recursive(
        base,
        lambda inner: st.tuples(inner, st.one_of(inner, st.sampled_from(VARS))).map(lambda p: couple(*p)),
        max_leaves=4,
    )


@st.composite
def ground_facts_db(draw, max_facts=5):
    c = rich_constants()
    facts = []
    for _ in range(draw(st.integers(0, max_facts))):
        rel = draw(st.sampled_from(SMALL_SCHEMA))
        facts.append(Atom(rel, tuple(draw(c) for _ in range(rel.key_arity)), tuple(draw(c) for _ in range(rel.nonkey_arity))))
    return Database(facts, draw(st.sampled_from([None, SMALL_SCHEMA])))


@st.composite
def rich_queries(draw, max_atoms=4):
    t = st.one_of(st.sampled_from(VARS), rich_constants())
    out = []
    for _ in range(draw(st.integers(0, max_atoms))):
        rel = draw(st.sampled_from(SMALL_SCHEMA))
        out.append(Atom(rel, tuple(draw(t) for _ in range(rel.key_arity)), tuple(draw(t) for _ in range(rel.nonkey_arity))))
    return Query(out, draw(st.sampled_from([None, SMALL_SCHEMA])))
