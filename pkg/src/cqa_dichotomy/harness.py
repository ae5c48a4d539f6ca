"""Random small instances and exhaustive checks of the two database reductions.

Every check compares brute-force repair counts before and after a reduction,
so a failing trial is a concrete counterexample.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .encoder import EncodingContext, new_encode, selfjoinfree_rewrite
from .minimizer import Unsatisfiable, is_minimal, key_chase, minimize
from .model import Atom, Const, Database, Query, RelationSymbol, Term, Var, key_equal
from .qparse import serialize
from .reducer import couple_database, couple_fact, pad_database, pad_fact
from .repairs import count_satisfying, repair_tuples

CONSTANT_POOL = ("0", "1", "a", "b")
RELATION_NAMES = ("R", "S", "T")


def random_schema(rng: random.Random, simple_key: bool = False, max_relations: int = 3) -> frozenset:
    n = rng.randint(1, max_relations)
    return frozenset(
        RelationSymbol(name, 1 if simple_key else rng.randint(1, 2), rng.randint(0, 2))
        for name in RELATION_NAMES[:n]
    )


def random_query(
    rng: random.Random,
    schema: Sequence[RelationSymbol],
    max_atoms: int = 4,
    extra_vars: int = 3,
    constant_prob: float = 0.15,
) -> Query:
    rels = sorted(schema, key=lambda r: r.name)
    n_atoms = rng.randint(1, max_atoms)
    pool = [Var(v) for v in ("x", "y", "z", "u", "v", "w", "s")[: n_atoms + rng.randint(0, extra_vars)]]

    def term() -> Term:
        if rng.random() < constant_prob:
            return Const(rng.choice(CONSTANT_POOL))
        return rng.choice(pool)

    atoms = []
    for _ in range(n_atoms):
        rel = rng.choice(rels)
        atoms.append(Atom(rel, tuple(term() for _ in range(rel.key_arity)), tuple(term() for _ in range(rel.nonkey_arity))))
    return Query(atoms, schema)


def random_database(
    rng: random.Random,
    q: Query,
    max_blocks: int = 5,
    max_block_size: int = 3,
    schema: Optional[Sequence[RelationSymbol]] = None,
) -> Database:
    """Blocks seeded partly from one random valuation of ``q``, so satisfying repairs are common."""
    schema = frozenset(q.schema if schema is None else schema)
    rels = sorted(schema, key=lambda r: r.name)
    theta = {v: Const(rng.choice(CONSTANT_POOL)) for v in sorted(q.variables, key=lambda v: v.name)}
    atoms = list(q.sorted_atoms)

    def value() -> Const:
        return Const(rng.choice(CONSTANT_POOL))

    seeds = [a.substitute(theta) for a in atoms]
    rng.shuffle(seeds)
    n_blocks = rng.randint(1, max_blocks) if max_blocks else 0
    facts: List[Atom] = []
    keys = set()
    for b in range(n_blocks):
        if b < len(seeds) and rng.random() < 0.8:
            seed = seeds[b]
        else:
            rel = rng.choice(rels)
            seed = Atom(rel, tuple(value() for _ in range(rel.key_arity)), tuple(value() for _ in range(rel.nonkey_arity)))
        if (seed.relation, seed.key) in keys:
            continue
        keys.add((seed.relation, seed.key))
        block = {seed}
        size = rng.randint(1, max_block_size)
        for _ in range(3 * size):
            if len(block) >= size:
                break
            block.add(Atom(seed.relation, seed.key, tuple(value() for _ in range(seed.relation.nonkey_arity))))
        facts.extend(block)
    return Database(facts, schema)


def key_transfer_failures(db: Database, image: Database, f) -> List[str]:
    facts = sorted(db.facts, key=lambda a: a.sort_key)
    mapped = {a: f(a) for a in facts}
    out = []
    for i, a in enumerate(facts):
        for b in facts[i:]:
            if key_equal(a, b) != key_equal(mapped[a], mapped[b]):
                out.append(f"key equality not transferred for {a} / {b}")
    if len(set(mapped.values())) != len(facts):
        out.append("fact map is not injective")
    return out


def repair_image_failures(db: Database, image: Database, f) -> List[str]:
    expected = {frozenset(f(a) for a in r) for r in repair_tuples(db)}
    actual = {frozenset(r) for r in repair_tuples(image)}
    out = []
    if len(expected) != len(actual) or expected != actual:
        out.append(f"repairs of image ({len(actual)}) differ from image of repairs ({len(expected)})")
    return out


@dataclass
class Trial:
    index: int
    query: Query
    database: Database
    failures: List[str] = field(default_factory=list)
    counts: Tuple[int, int] = (0, 0)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_lemma2(rng: random.Random, index: int = 0, max_blocks: int = 5, max_block_size: int = 3) -> Trial:
    """count(db, q) == count(pad(db), new_encode(q)), plus repair and key-equality transfer."""
    schema = random_schema(rng)
    q = random_query(rng, schema)
    db = random_database(rng, q, max_blocks, max_block_size)
    ctx = EncodingContext.from_schema(schema)
    image = pad_database(db, ctx)
    encoded = new_encode(q, ctx)
    before, after = count_satisfying(db, q), count_satisfying(image, encoded)
    trial = Trial(index, q, db, counts=(before, after))
    if before != after:
        trial.failures.append(f"count {before} on db but {after} on padded db")

    def f(a):
        return pad_fact(a, ctx)

    trial.failures += key_transfer_failures(db, image, f)
    trial.failures += repair_image_failures(db, image, f)
    return trial


def random_minimal_query(rng: random.Random, simple_key: bool = False) -> Query:
    while True:
        schema = random_schema(rng, simple_key=simple_key)
        q = random_query(rng, schema)
        if isinstance(key_chase(q), Unsatisfiable):
            continue
        return minimize(q)


def check_lemma1(rng: random.Random, index: int = 0, max_blocks: int = 5, max_block_size: int = 3) -> Trial:
    """count(db, q') == count(couple(db), q) for minimal q and its self-join-free rewrite q'."""
    q = random_minimal_query(rng)
    rewrite = selfjoinfree_rewrite(q)
    db = random_database(rng, rewrite.query, max_blocks, max_block_size)
    image = couple_database(db, rewrite)
    before, after = count_satisfying(db, rewrite.query), count_satisfying(image, q)
    trial = Trial(index, q, db, counts=(before, after))
    if not is_minimal(q):
        trial.failures.append("generated query is not minimal")
    if before != after:
        trial.failures.append(f"count {before} on db for q' but {after} on coupled db for q")
    by_relation = {a.relation: a for a in rewrite.query.atoms}

    def f(a):
        atom = by_relation[a.relation]
        return couple_fact(a, atom, rewrite.origin[atom].relation)

    trial.failures += key_transfer_failures(db, image, f)
    trial.failures += repair_image_failures(db, image, f)
    return trial


CHECKS = {1: check_lemma1, 2: check_lemma2}


def trial_rng(seed: int, lemma: int, index: int) -> random.Random:
    return random.Random(f"{seed}/{lemma}/{index}")


@dataclass
class VerificationReport:
    lemma: int
    seed: int
    trials: List[Trial]

    @property
    def failures(self) -> List[Trial]:
        return [t for t in self.trials if not t.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def render(self) -> str:
        n, bad = len(self.trials), len(self.failures)
        lines = [f"lemma {self.lemma}: {n - bad}/{n} pass"]
        for t in self.failures:
            lines.append(f"FAIL trial {t.index} (reproduce: --lemma {self.lemma} --seed {self.seed} --trial {t.index})")
            lines += [f"  {msg}" for msg in t.failures]
            lines.append("  query: " + serialize(t.query))
            lines += ["  fact: " + line for line in serialize(t.database).splitlines()]
        return "\n".join(lines)


def run_verification(
    lemma: int,
    trials: int,
    seed: int,
    max_blocks: int = 5,
    max_block_size: int = 3,
    only: Optional[int] = None,
) -> VerificationReport:
    check = CHECKS[lemma]
    indices = [only] if only is not None else range(trials)
    results = [check(trial_rng(seed, lemma, i), i, max_blocks, max_block_size) for i in indices]
    return VerificationReport(lemma, seed, results)
