"""Apply the admissible-rule transforms and inversions to corpus proofs.

Usage: python scripts/transform_suite.py [subderivations-per-proof]

Reports, per transform and logic, how many applications produced a derivation
that checks and does not grow in height (the GD-family exemptions apply).
"""

import sys
import time
from collections import Counter

from nestseq.calculus import calculus
from nestseq.corpus import corpus
from nestseq.prover import prove
from nestseq.suite import cases, inversions, run_case, run_inversion, subderivations


def main(limit: int = 40) -> int:
    stats: Counter = Counter()
    reproved: Counter = Counter()
    fails = []
    t0 = time.time()
    for g in corpus():
        for logic, want in g.expected.items():
            if want != "proved":
                continue
            calc = calculus(logic)
            r = prove(g.formula, calc)
            for d in subderivations(r.derivation, limit):
                outcomes = [run_case(name, src, th, calc) for name, src, th in cases(d, calc, reproved)]
                outcomes += [run_inversion(rule, inst, d, calc) for rule, inst in inversions(d, calc)]
                for o in outcomes:
                    stats[(o.name.split(":")[0], logic, o.ok)] += 1
                    if not o.ok:
                        fails.append((g.name, logic, o.name, o.detail))
    for k in sorted({k[:2] for k in stats}):
        print(f"{k[0]:8} {k[1]:3} ok={stats[k + (True,)]} bad={stats[k + (False,)]}")
    print("reproved:", dict(reproved))
    for f in fails[:25]:
        print("FAIL", *f)
    print(f"{len(fails)} failures in {time.time() - t0:.1f}s")
    return 1 if fails else 0


if __name__ == "__main__":
    sys.exit(main(*map(int, sys.argv[1:])))
