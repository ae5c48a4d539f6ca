"""Text formats for schemas, queries (.cq) and databases (.facts).

Grammar::

    document := [ '{' ] { statement [ ',' ] } [ '}' ]
    statement := 'rel' NAME 'key' INT 'val' INT | atom
    atom     := NAME '[' terms ';' terms ']'
    term     := ident | number | "string" | 'NAME' | '<' term '|' term '>'

In a query a bare lowercase identifier is a variable. In a database, and in
the left coordinate of a couple, it is a constant unless
``bare_constants=False`` is passed. Lines starting with
``%`` are comments.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .model import (
    Atom,
    Const,
    Couple,
    Database,
    Query,
    RelConst,
    RelationSymbol,
    Term,
    Var,
    canonical,
    couple,
    schema_by_name,
)

__all__ = [
    "ParseError",
    "parse_schema",
    "parse_query",
    "parse_database",
    "serialize",
    "to_json",
    "classification_schema",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
   |(?P<comment>%[^\n]*)
   |(?P<relconst>'[A-Z][A-Za-z0-9_\#]*')
   |(?P<string>"(?:[^"\\\n]|\\.)*")
   |(?P<name>[A-Z][A-Za-z0-9_\#]*)
   |(?P<ident>[a-z_][A-Za-z0-9_\#]*)
   |(?P<number>[0-9][A-Za-z0-9_\#.]*)
   |(?P<punct>[\[\];,<>|{}])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, ground: bool, bare_constants: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ground = ground
        self.bare_constants = bare_constants

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def take(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.text else "end of input"
            raise self.error(f"expected {want}, got {got}")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.kind == "punct" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def document(self) -> Tuple[List[Tuple[RelationSymbol, _Token]], List[Tuple[str, list, list, _Token]]]:
        decls, atoms = [], []
        braced = self.accept("{")
        while self.tok.kind != "eof" and not (braced and self.tok.text == "}"):
            if self.tok.kind == "ident":
                decls.append(self.declaration())
            elif self.tok.kind == "name":
                atoms.append(self.atom())
            else:
                raise self.error(f"expected an atom or a rel declaration, got {self.tok.text!r}")
            self.accept(",")
        if braced:
            self.take("punct", "}")
        self.take("eof")
        return decls, atoms

    def integer(self) -> int:
        tok = self.take("number")
        if not tok.text.isdigit():
            raise self.error(f"expected an integer, got {tok.text!r}", tok)
        return int(tok.text)

    def declaration(self) -> Tuple[RelationSymbol, _Token]:
        start = self.tok
        self.take("ident", "rel")
        name = self.take("name").text
        self.take("ident", "key")
        key = self.integer()
        self.take("ident", "val")
        val = self.integer()
        try:
            return RelationSymbol(name, key, val), start
        except ValueError as exc:
            raise self.error(str(exc), start) from None

    def atom(self):
        start = self.take("name")
        self.take("punct", "[")
        key = self.terms(";")
        self.take("punct", ";")
        nonkey = self.terms("]")
        self.take("punct", "]")
        if not key:
            raise self.error(f"{start.text}: empty primary key", start)
        return start.text, key, nonkey, start

    def terms(self, stop: str) -> List[Term]:
        out: List[Term] = []
        if self.tok.kind == "punct" and self.tok.text == stop:
            return out
        out.append(self.term(self.ground))
        while self.accept(","):
            out.append(self.term(self.ground))
        return out

    def term(self, ground: bool) -> Term:
        tok = self.tok
        if tok.kind == "punct" and tok.text == "<":
            self.i += 1
            # the left coordinate is always a data constant
            left = self.term(True)
            self.take("punct", "|")
            right = self.term(False)
            self.take("punct", ">")
            return couple(left, right)
        self.i += 1
        if tok.kind == "ident":
            if not ground:
                return Var(tok.text)
            if not self.bare_constants:
                raise self.error(f"non-ground term {tok.text!r} in a fact", tok)
            return Const(tok.text)
        if tok.kind == "number":
            return Const(tok.text)
        if tok.kind == "relconst":
            return RelConst(tok.text[1:-1])
        if tok.kind == "string":
            try:
                value = json.loads(tok.text)
            except ValueError:
                raise self.error(f"malformed string literal {tok.text}", tok) from None
            return Const(value)
        self.i -= 1
        got = repr(tok.text) if tok.text else "end of input"
        raise self.error(f"expected a term, got {got}")


def _resolve(
    decls, raw_atoms, schema: Optional[Iterable[RelationSymbol]], infer: bool
) -> Tuple[List[Atom], frozenset]:
    known: Dict[str, RelationSymbol] = dict(schema_by_name(schema or ()))
    for rel, tok in decls:
        prior = known.get(rel.name)
        if prior is not None and prior != rel:
            raise ParseError(f"conflicting declarations for {rel.name}", tok.line, tok.column)
        known[rel.name] = rel
    atoms = []
    for name, key, nonkey, tok in raw_atoms:
        rel = known.get(name)
        if rel is None:
            if not infer:
                raise ParseError(f"unknown relation {name}", tok.line, tok.column)
            rel = known[name] = RelationSymbol(name, len(key), len(nonkey))
        elif (len(key), len(nonkey)) != (rel.key_arity, rel.nonkey_arity):
            if len(key) + len(nonkey) != rel.arity:
                msg = f"arity mismatch for {name}: expected {rel.arity} terms, got {len(key) + len(nonkey)}"
            else:
                msg = (
                    f"key/non-key split mismatch for {name}: expected {rel.key_arity};{rel.nonkey_arity}, "
                    f"got {len(key)};{len(nonkey)}"
                )
            raise ParseError(msg, tok.line, tok.column)
        atoms.append(Atom(rel, tuple(key), tuple(nonkey)))
    return atoms, frozenset(known.values())


def parse_schema(text: str) -> frozenset:
    """Parse a file of ``rel NAME key K val M`` lines."""
    decls, atoms = _Parser(text, ground=False, bare_constants=True).document()
    if atoms:
        _, _, _, tok = atoms[0]
        raise ParseError("schema files contain only rel declarations", tok.line, tok.column)
    _, schema = _resolve(decls, [], None, infer=False)
    return schema


def parse_query(text: str, schema: Optional[Iterable[RelationSymbol]] = None) -> Query:
    """Parse a query; signatures come from ``schema``, inline declarations, or first use."""
    decls, raw = _Parser(text, ground=False, bare_constants=True).document()
    atoms, full_schema = _resolve(decls, raw, schema, infer=True)
    return Query(atoms, full_schema)


def parse_database(
    text: str, schema: Optional[Iterable[RelationSymbol]] = None, bare_constants: bool = True
) -> Database:
    """Parse one fact per line.

    With an explicit ``schema`` every relation must be declared (there or inline).
    """
    decls, raw = _Parser(text, ground=True, bare_constants=bare_constants).document()
    for name, key, nonkey, tok in raw:
        for t in key + nonkey:
            if isinstance(t, Var) or (isinstance(t, Couple) and isinstance(t.left, Var)):
                raise ParseError(f"non-ground term in fact {name}", tok.line, tok.column)
    atoms, full_schema = _resolve(decls, raw, schema, infer=schema is None)
    return Database(atoms, full_schema)


# -- serialization ---------------------------------------------------------------


def _declarations(schema: frozenset, used: frozenset) -> List[str]:
    return [str(r) for r in sorted(schema - used, key=lambda r: r.name)]


def serialize_query(q: Query) -> str:
    lines = _declarations(q.schema, q.relations)
    body = ", ".join(a.format() for a in q.sorted_atoms)
    return "\n".join(lines + [body]) if lines else body


def serialize_database(db: Database) -> str:
    lines = _declarations(db.schema, frozenset(f.relation for f in db.facts))
    lines += [f.format(ground=True) for f in canonical(db.facts)]
    return "\n".join(lines)


def to_json(x) -> dict:
    """Stable-key JSON-ready dict for a Query, Database or Classification."""
    if isinstance(x, Query):
        return {
            "atoms": [a.format() for a in x.sorted_atoms],
            "schema": [str(r) for r in sorted(x.schema, key=lambda r: r.name)],
        }
    if isinstance(x, Database):
        return {
            "facts": [f.format(ground=True) for f in canonical(x.facts)],
            "schema": [str(r) for r in sorted(x.schema, key=lambda r: r.name)],
        }
    if hasattr(x, "to_json"):
        return x.to_json()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def serialize(x: Union[Query, Database, object], json_mode: bool = False) -> str:
    """Canonical text (or, with ``json_mode``, JSON) for queries, databases and classifications."""
    if json_mode:
        return json.dumps(to_json(x), indent=2, sort_keys=True)
    if isinstance(x, Query):
        return serialize_query(x)
    if isinstance(x, Database):
        return serialize_database(x)
    if hasattr(x, "render"):
        return x.render()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def classification_schema() -> dict:
    """JSON Schema that ``classify --json`` output validates against."""
    return json.loads(resources.files(__package__).joinpath("classification.schema.json").read_text())
