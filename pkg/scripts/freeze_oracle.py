"""Freeze brute-force oracle verdicts into tests/data/oracle_frozen.json.

Propositional formulas come from a seeded generator; each is checked in I and
GD over all models with at most 3 worlds.  A few first-order formulas are
checked in ND and CD with at most 3 worlds and 2 domain elements.
"""

import json
import random
import sys
from pathlib import Path

from nestseq import formula as F
from nestseq.generate import random_prop
from nestseq.semantics import enumerate_countermodel

# formulas that separate I from GD, plus a few classical tautologies
HAND = [
    "(p -> q) | (q -> p)",
    "((p -> q) -> r) -> ((q -> p) -> r) -> r",
    "p | (p -> bot)",
    "((p -> q) -> p) -> p",
    "((p -> bot) -> bot) -> p",
    "(p -> bot) | ((p -> bot) -> bot)",
    "(p -> q | r) -> (p -> q) | (p -> r)",
]

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "oracle_frozen.json"

FIRST_ORDER = [
    "(forall x. (P(x) | q)) -> (forall x. P(x)) | q",
    "(forall x. P(x)) -> exists x. P(x)",
    "(exists x. (P(x) -> q)) -> (forall x. P(x)) -> q",
    "(forall x. (q -> P(x))) -> q -> forall x. P(x)",
    "((exists x. P(x)) -> q) -> forall x. (P(x) -> q)",
    "((forall x. P(x)) -> q) -> exists x. (P(x) -> q)",
    "(forall x. (P(x) | (P(x) -> bot))) -> (forall x. P(x)) | ((forall x. P(x)) -> bot)",
    "(forall x. (P(x) -> bot)) -> (exists x. P(x)) -> bot",
]


def main(n: int = 80, seed: int = 2024) -> None:
    rng = random.Random(seed)
    rows = []
    seen = set()
    for text in HAND:
        f = F.parse(text)
        seen.add(F.show(f))
        rows.append({"formula": F.show(f), **{lg: enumerate_countermodel(f, lg, 3).found for lg in ("I", "GD")}})
    while len(rows) < n + len(HAND):
        f = random_prop(rng, 5)
        if F.show(f) in seen:
            continue
        seen.add(F.show(f))
        row = {"formula": F.show(f)}
        for logic in ("I", "GD"):
            row[logic] = enumerate_countermodel(f, logic, 3).found
        rows.append(row)
    fo = []
    for text in FIRST_ORDER:
        f = F.parse(text)
        row = {"formula": F.show(f)}
        for logic in ("ND", "CD"):
            r = enumerate_countermodel(f, logic, 3, 2)
            assert not r.truncated
            row[logic] = r.found
        fo.append(row)
    OUT.parent.mkdir(exist_ok=True)
    OUT.write_text(json.dumps({"seed": seed, "propositional": rows, "first_order": fo}, indent=1) + "\n")
    print(f"wrote {len(rows)} propositional and {len(fo)} first-order verdicts to {OUT}")


if __name__ == "__main__":
    main(*map(int, sys.argv[1:]))
