"""Counting consistent query answers under primary keys: encodings, reductions,
a brute-force repair oracle, and the FP / #P-hard classifier."""

from .classifier import Classification, Verdict, classify_skbcq, demonstrate_se3, is_easy, simplify
from .encoder import EncodingContext, NoPreimage, invert_old_encode, new_encode, old_encode, selfjoinfree_rewrite
from .minimizer import Unsatisfiable, endomorphisms, is_minimal, key_chase, minimize
from .model import (
    ZERO,
    Atom,
    Const,
    Couple,
    Database,
    Fact,
    Query,
    RelConst,
    RelationSymbol,
    Var,
    complex_part,
    connected,
    couple,
    evaluate,
    intersection_graph,
    key_equal,
)
from .qparse import ParseError, parse_database, parse_query, parse_schema, serialize
from .reducer import couple_database, couple_fact, pad_database, pad_fact
from .repairs import RepairSpaceTooLarge, blocks, count_satisfying, repairs

__version__ = "0.1.0"
