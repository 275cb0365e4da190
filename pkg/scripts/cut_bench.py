"""Build derivations with cuts and time their elimination.

usage: python scripts/cut_bench.py [LOGIC] [COUNT] [SEED]
"""

import sys
import time

from nestseq.calculus import calculus
from nestseq.derivation import check, height
from nestseq.generate import cut_corpus
from nestseq.transform.cut import eliminate_cut, has_cut


def main(logic: str = "I", count: int = 50, seed: int = 0) -> int:
    calc = calculus(logic)
    t = time.perf_counter()
    ds = cut_corpus(calc, count, seed)
    print(f"built {len(ds)} derivations in {time.perf_counter() - t:.1f}s", flush=True)
    bad, worst = 0, 0.0
    for i, d in enumerate(ds):
        cuts = sum(1 for x in d.nodes() if x.rule == "cut")
        t = time.perf_counter()
        e = eliminate_cut(d, calc)
        dt = time.perf_counter() - t
        worst = max(worst, dt)
        errs = check(e, calc)
        ok = not errs and not has_cut(e) and e.conclusion == d.conclusion and dt < 10
        bad += not ok
        print(f"{'ok' if ok else 'FAIL'} {i:3d} cuts={cuts} h {height(d)} -> {height(e)} {dt:.2f}s", flush=True)
    print(f"{bad} failures, slowest {worst:.2f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    args = sys.argv[1:]
    sys.exit(main(args[0] if args else "I", int(args[1]) if len(args) > 1 else 50, int(args[2]) if len(args) > 2 else 0))
