"""Prove every corpus goal in every logic it is tested in and report the outcome."""

import sys
import time

from nestseq.calculus import calculus
from nestseq.corpus import corpus
from nestseq.derivation import check, height
from nestseq.prover import prove
from nestseq.semantics import check_frame, forces, truth_lemma_violations
from nestseq.sequent import ROOT


def main() -> int:
    bad = 0
    for g in corpus():
        for logic, want in g.expected.items():
            calc = calculus(logic)
            t = time.perf_counter()
            r = prove(g.formula, calc)
            dt = time.perf_counter() - t
            note = ""
            if r.status == "proved":
                errs = check(r.derivation, calc)
                note = f"h={height(r.derivation)} check={'ok' if not errs else errs[0]}"
                ok = not errs
            elif r.status == "refuted":
                frame = check_frame(r.model, logic)
                falsified = not forces(r.model, r.iota[ROOT], r.mu, g.formula)
                tl = truth_lemma_violations(r.model, r.branch.top, r.iota, r.mu)
                note = f"frame={frame or 'ok'} falsified={falsified} truth-lemma={tl or 'ok'}"
                ok = not frame and falsified and not tl
            else:
                note, ok = r.reason, False
            ok = ok and r.status == want
            bad += not ok
            print(f"{'ok ' if ok else 'BAD'} {g.name:6} {logic:3} {r.status:8} {dt:6.2f}s {note}")
    print(f"{bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
