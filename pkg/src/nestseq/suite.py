"""Harness that exercises the proof transforms on a given derivation.

``cases`` enumerates applications of the admissible rules to a derivation
and ``inversions`` the logical-rule instances applicable to its conclusion;
``run_case`` and ``run_inversion`` execute one item and report whether the
output checks and respects the height bound.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import formula as F
from . import sequent as S
from . import transform as T
from .calculus import LOGICAL, Calculus, applicable_instances
from .derivation import Derivation, check, height
from .sequent import IN, OUT, PF

EXTRA_IN = PF(F.parse("s0"), IN)
EXTRA_OUT = PF(F.parse("s0"), OUT)
# rules whose height bound is not claimed in the GD family
NOT_HP_IN_GD = set(T.GD_REPROVE)


@dataclass
class Outcome:
    name: str
    ok: bool
    detail: str = ""
    reproved: bool = False


def subderivations(d: Derivation, limit: int) -> list[Derivation]:
    """Up to ``limit`` subderivations with distinct conclusions, root first."""
    seen, out, stack = set(), [], [d]
    while stack and len(out) < limit:
        n = stack.pop()
        if n.conclusion in seen:
            continue
        seen.add(n.conclusion)
        out.append(n)
        stack.extend(reversed(n.children))
    return out


def _fmt(pf: PF) -> str:
    return f"{F.show(pf.formula)}^{'i' if pf.pol is IN else 'o'}"


def _req(rule: str, d: Derivation, calc: Calculus, log: Counter, **args) -> Derivation:
    args = {k: (S.label_name(v) if isinstance(v, int) else v) for k, v in args.items()}
    res = T.apply_request(T.TransformRequest(rule, d, args), calc)
    log[rule] += res.reproved
    return res.derivation


def cases(d: Derivation, calc: Calculus, log: Counter | None = None):
    """(name, input derivation, thunk) triples covering the admissible rules on d."""
    log = log if log is not None else Counter()
    s = d.conclusion
    labels = s.labels()
    par = S.parents(s)
    for w in labels:
        yield "wk", d, lambda w=w: T.wk(d, calc, w, [EXTRA_IN, EXTRA_OUT])
    for n in s.nodes():
        for pf in sorted(set(n.forms), key=str):
            dup = T.wk(d, calc, n.label, [pf])
            if pf.pol is IN:
                yield "ctr_in", dup, lambda dup=dup, n=n, pf=pf: T.ctr_in(dup, calc, n.label, pf)
            else:
                yield "ctr_out", dup, lambda dup=dup, n=n, pf=pf: _req(
                    "ctr_out", dup, calc, log, w=n.label, formula=_fmt(pf)
                )
    for u in labels:
        if u == S.ROOT:
            continue
        outs = [_fmt(pf) for pf in s.find(par[u]).forms if pf.pol is OUT][:1]
        ins = [pf for pf in s.find(u).forms if pf.pol is IN][:1]
        yield "mrg", d, lambda u=u: T.mrg(d, calc, u)
        yield "ex", d, lambda u=u: _req("ex", d, calc, log, v=u)
        yield "lwr", d, lambda u=u, outs=outs: _req("lwr", d, calc, log, w=par[u], u=u, forms=outs)
        yield "lft", d, lambda u=u, ins=ins: T.lft(d, calc, par[u], u, ins)
    for n in s.nodes():
        kids = [c.label for c in n.children]
        for a in kids:
            for b in kids:
                if a != b:
                    yield "ec", d, lambda a=a, b=b: _req("ec", d, calc, log, u=a, v=b)
    yield "bot_r", d, lambda: T.bot_r(T.wk(d, calc, S.ROOT, [PF(F.BOT, OUT)]), calc, S.ROOT)
    yield "n", d, lambda: T.n(d, calc)
    if not calc.first_order:
        return
    for x in sorted(s.vars()):
        yield "ps", d, lambda x=x: T.ps(d, calc, x, "v9")
    for n in s.nodes():
        for x in sorted(set(n.sig)):
            if n.label in par:
                yield "nd", d, lambda n=n, x=x: T.nd(d, calc, par[n.label], n.label, [x])
                if calc.regime == "CD":
                    yield "dd", d, lambda n=n, x=x: T.dd(
                        T.nd(d, calc, par[n.label], n.label, [x]), calc, par[n.label], n.label, [x]
                    )
            dupv = T.wv(d, calc, n.label, [x])
            yield "cv", dupv, lambda dupv=dupv, n=n, x=x: T.cv(dupv, calc, n.label, x)
        if calc.regime == "CD":
            yield "cd", d, lambda n=n: T.cd(T.wv(d, calc, n.label, ["v8"]), calc, n.label, ["v8"])
        yield "wv", d, lambda n=n: T.wv(d, calc, n.label, ["v7"])


def inversions(d: Derivation, calc: Calculus):
    """(rule, instance) for every logical rule instance applicable to d's conclusion."""
    s = d.conclusion
    for rule in sorted(LOGICAL & calc.rules):
        for inst in applicable_instances(s, rule, calc):
            yield rule, inst


def run_case(name: str, src: Derivation, thunk, calc: Calculus) -> Outcome:
    try:
        out = thunk()
    except Exception as e:  # noqa: BLE001 - reported as a failure
        return Outcome(name, False, f"{type(e).__name__}: {e}"[:300])
    errs = check(out, calc)
    if errs:
        return Outcome(name, False, str(errs[0]))
    hp_exempt = calc.gd_family and name in NOT_HP_IN_GD
    if not hp_exempt and height(out) > height(src):
        return Outcome(name, False, f"height {height(out)} > {height(src)}")
    return Outcome(name, True)


def run_inversion(rule: str, inst, d: Derivation, calc: Calculus) -> Outcome:
    """Invert, check each premise derivation, then reapply the rule."""
    name = f"invert:{rule}"
    try:
        outs = T.invert(rule, d, calc, inst.params)
        for o in outs:
            errs = check(o, calc)
            if errs:
                return Outcome(name, False, str(errs[0]))
            if height(o) > height(d):
                return Outcome(name, False, f"height {height(o)} > {height(d)}")
        back = T.engine.assemble(rule, d.conclusion, inst.params, outs, calc)
    except Exception as e:  # noqa: BLE001
        return Outcome(name, False, f"{type(e).__name__}: {e}"[:300])
    errs = check(back, calc)
    return Outcome(name, not errs, str(errs[0]) if errs else "")
