import itertools
import random

import pytest
from hypothesis import assume, given, settings

from cqa_dichotomy.encoder import EncodingContext, SchemaError, new_encode, selfjoinfree_rewrite
from cqa_dichotomy.harness import random_database
from cqa_dichotomy.minimizer import Unsatisfiable, key_chase, minimize
from cqa_dichotomy.model import Const, Database, RelationSymbol, couple, evaluate, key_equal
from cqa_dichotomy.qparse import parse_database, parse_query, parse_schema, serialize
from cqa_dichotomy.reducer import KeyTransferError, couple_database, couple_fact, pad_database, pad_fact
from cqa_dichotomy.repairs import count_satisfying

from helpers import SMALL_SCHEMA, brute_count, brute_repairs, databases, queries

q = parse_query
S0 = parse_schema("rel R key 1 val 1\nrel S key 1 val 0")
CTX11 = EncodingContext.from_schema(S0)
CTX22 = EncodingContext.from_schema(parse_schema("rel R key 1 val 1\nrel T key 2 val 2"))


def fact(text, schema=None):
    (f,) = parse_database(text, schema=schema)
    return f


def show(f):
    return f.format(ground=True)


class TestPad:
    def test_no_padding(self):
        assert show(pad_fact(fact("R[a; 1]"), CTX11)) == "N['R',a; 1]"

    def test_nonkey_zero(self):
        assert show(pad_fact(fact("S[1;]"), CTX11)) == "N['S',1; 0]"

    def test_both_paddings(self):
        assert show(pad_fact(fact("R[a; 1]"), CTX22)) == "N['R',a,0; 1,0]"

    def test_database(self):
        out = pad_database(parse_database("R[a; 1]\nR[a; 2]\nS[1;]"), CTX11)
        assert serialize(out) == "N['R',a; 1]\nN['R',a; 2]\nN['S',1; 0]"

    def test_empty(self):
        assert len(pad_database(Database(), CTX11)) == 0

    def test_key_equal_facts_stay_key_equal(self):
        f, g = fact("R[a; 1]"), fact("R[a; 2]")
        assert key_equal(pad_fact(f, CTX11), pad_fact(g, CTX11))

    def test_unknown_relation(self):
        with pytest.raises(SchemaError):
            pad_fact(fact("T[a;]"), CTX11)

    @settings(max_examples=150)
    @given(databases(max_facts=6))
    def test_repair_transfer(self, d):
        ctx = EncodingContext.from_schema(SMALL_SCHEMA)
        image = pad_database(d, ctx)
        expected = {frozenset(pad_fact(f, ctx) for f in r) for r in brute_repairs(d)}
        assert {frozenset(r) for r in brute_repairs(image)} == expected
        for f, g in itertools.product(d.facts, repeat=2):
            assert key_equal(f, g) == key_equal(pad_fact(f, ctx), pad_fact(g, ctx))

    @settings(max_examples=150)
    @given(queries(max_atoms=3), databases(max_facts=6))
    def test_satisfaction_per_repair(self, query, d):
        ctx = EncodingContext.from_schema(SMALL_SCHEMA)
        encoded = new_encode(query, ctx)
        for r in brute_repairs(d):
            assert evaluate(query, r) == evaluate(encoded, [pad_fact(f, ctx) for f in r])

    @settings(max_examples=100)
    @given(queries(max_atoms=3), databases(max_facts=6))
    def test_count_preserved_against_oracle(self, query, d):
        ctx = EncodingContext.from_schema(SMALL_SCHEMA)
        expected = brute_count(d, query)
        assert count_satisfying(d, query) == expected
        assert count_satisfying(pad_database(d, ctx), new_encode(query, ctx)) == expected


class TestCouple:
    rw = selfjoinfree_rewrite(q("R[x; y], R[y; z]"))
    r1, r2 = (a for a in rw.query.sorted_atoms)

    def test_basic(self):
        rw = selfjoinfree_rewrite(q("R[x; y]"))
        (atom,) = rw.query
        out = couple_fact(fact("R#1[a; b]"), atom, rw.origin[atom].relation)
        assert show(out) == "R[<a|x>; <b|y>]"

    def test_collapse(self):
        rw = selfjoinfree_rewrite(q("R[x; 0]"))
        (atom,) = rw.query
        assert show(couple_fact(fact("R#1[a; 0]"), atom, rw.origin[atom].relation)) == "R[<a|x>; 0]"
        assert show(couple_fact(fact("R#1[a; 1]"), atom, rw.origin[atom].relation)) == "R[<a|x>; <1|0>]"

    def test_same_values_different_atoms(self):
        rel = self.rw.origin[self.r1].relation
        f = couple_fact(fact("R#1[a; b]"), self.r1, rel)
        g = couple_fact(fact("R#2[a; b]"), self.r2, rel)
        assert show(f) == "R[<a|x>; <b|y>]"
        assert show(g) == "R[<a|y>; <b|z>]"
        assert f != g

    def test_database_singleton(self):
        rw = selfjoinfree_rewrite(q("R[x; y]"))
        assert serialize(couple_database(parse_database("R#1[a; 1]"), rw)) == "R[<a|x>; <1|y>]"

    def test_key_equality_carried(self):
        rw = selfjoinfree_rewrite(q("R[x; y]"))
        out = list(couple_database(parse_database("R#1[a; 1]\nR#1[a; 2]"), rw))
        assert key_equal(*out)

    def test_distinct_keys_stay_distinct(self):
        rw = selfjoinfree_rewrite(q("R[x; y], R[u; v], S[y; v]"))
        d = parse_database("R#1[a; 1]\nR#2[a; 1]")
        f, g = couple_database(d, rw)
        assert not key_equal(f, g)

    def test_rejects_key_sharing_source(self):
        rw = selfjoinfree_rewrite(q("R[x; y], R[x; z]"))
        with pytest.raises(KeyTransferError):
            couple_database(Database([], rw.query.schema), rw)

    def test_wrong_relation(self):
        rw = selfjoinfree_rewrite(q("R[x; y]"))
        with pytest.raises(ValueError):
            couple_database(parse_database("S#1[a; 1]"), rw)

    def test_non_minimal_query_breaks_count(self):
        # without minimality both atoms of q can map onto one coupled fact
        query = q("R[x; y], R[u; v]")
        rw = selfjoinfree_rewrite(query)
        d = parse_database("R#1[a; b]", schema=rw.query.schema)
        assert count_satisfying(d, rw.query) == 0
        assert count_satisfying(couple_database(d, rw), query) == 1

    def test_cyclic_minimal_query(self):
        query = q("R[x; y], R[y; z], S[z; x]")
        rw = selfjoinfree_rewrite(query)
        d = parse_database("R#1[a; b]\nR#1[a; c]\nR#2[b; c]\nR#2[c; a]\nS#1[c; a]", schema=rw.query.schema)
        image = couple_database(d, rw)
        assert count_satisfying(d, rw.query) == brute_count(d, rw.query) == 1
        assert count_satisfying(image, query) == brute_count(image, query) == 1

    @settings(max_examples=150, deadline=None)
    @given(queries(max_atoms=3))
    def test_count_and_repairs_transfer(self, query):
        assume(not isinstance(key_chase(query), Unsatisfiable))
        qm = minimize(query)
        rw = selfjoinfree_rewrite(qm)
        by_rel = {a.relation: a for a in rw.query.atoms}
        rng = random.Random(serialize(qm))
        for _ in range(5):
            d = random_database(rng, rw.query, max_blocks=3, max_block_size=2)
            image = couple_database(d, rw)
            f = {a: couple_fact(a, by_rel[a.relation], rw.origin[by_rel[a.relation]].relation) for a in d.facts}
            assert brute_count(d, rw.query) == brute_count(image, qm)
            assert {frozenset(r) for r in brute_repairs(image)} == {
                frozenset(f[a] for a in r) for r in brute_repairs(d)
            }
