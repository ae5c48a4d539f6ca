"""Worked counterexample: the zero-padded encoding is not invertible on databases.

For q0 = R[x; y], S[y;] the zero-padded encoding looks hard while q0 itself
is easy, and the encoded-side database below has no preimage, since every
encoded S-fact carries 0 in its padding position.
"""

from __future__ import annotations

from typing import List

from .classifier import Verdict, classify_skbcq, is_easy
from .encoder import NoPreimage, invert_old_encode, new_encode, old_encode
from .model import complex_part, canonical
from .qparse import parse_database, parse_query

Q0 = "R[x; y], S[y;]"
DB0 = "N['R',b; c]\nN['S',c; 0]\nN['S',c; 1]"


def _atoms(atoms) -> str:
    return ", ".join(a.format() for a in canonical(atoms)) or "(none)"


def demo_flaw() -> List[str]:
    q0 = parse_query(Q0)
    schema = q0.schema
    old, new = old_encode(q0, schema), new_encode(q0, schema)
    db0 = parse_database(DB0)
    preimage = invert_old_encode(db0, schema)
    old_easy = is_easy(old)
    verdict = classify_skbcq(q0, schema).verdict

    lines = [
        f"query q0: {q0}",
        f"schema: {'; '.join(str(r) for r in sorted(schema, key=lambda r: r.name))}",
        f"zero-padded encoding: {old}",
        f"fresh-variable encoding: {new}",
        f"complex part (zero-padded): {_atoms(complex_part(old))}",
        f"complex part (fresh-variable): {_atoms(complex_part(new))}",
        "database over N: " + ", ".join(f.format(ground=True) for f in db0),
    ]
    if isinstance(preimage, NoPreimage):
        lines.append(f"inverting the zero-padded encoding: {preimage} ({preimage.reason})")
    else:
        lines.append(f"inverting the zero-padded encoding: {', '.join(f.format(ground=True) for f in preimage)}")
    lines += [
        f"is_easy(zero-padded encoding): {str(old_easy).lower()}",
        f"classify(q0): {verdict.label}",
        f"old encoding: {(Verdict.FP if old_easy else Verdict.SHARP_P_HARD).label}; query: {verdict.label}",
    ]
    return lines
