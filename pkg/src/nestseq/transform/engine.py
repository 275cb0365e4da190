"""Permutation engine shared by every proof rewrite.

A structural operation (``Op``) says how it changes a sequent and how it
changes the parameters of an inference.  ``run`` pushes the operation up a
derivation: at each inference it rebuilds the rule on the transformed
conclusion and checks that the premises are the transformed premises.  When
that fails (typically because the operation touches the principal formula)
the operation's ``special`` hook supplies a replacement derivation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace

from .. import calculus as C
from .. import formula as F
from .. import sequent as S
from ..calculus import Calculus, Params, RuleError
from ..derivation import Derivation
from ..sequent import PF, Fresh, Node


class TransformError(ValueError):
    pass


@dataclass
class Ctx:
    calc: Calculus
    fresh: Fresh


def names_of(d: Derivation) -> tuple[set[str], set[int]]:
    vs: set[str] = set()
    ls: set[int] = set()
    stack = [d]
    while stack:
        n = stack.pop()
        s = n.conclusion
        vs |= s.all_var_names()
        ls.update(s.labels())
        if n.params.var:
            vs.add(n.params.var)
        stack.extend(n.children)
    return vs, ls


def context(d: Derivation, calc: Calculus, *extra) -> Ctx:
    vs, ls = names_of(d)
    return Ctx(calc, Fresh.above(vs, max(ls), *extra))


def assemble(rule: str, concl: Node, params: Params, kids, calc: Calculus) -> Derivation:
    try:
        inst = C.build(rule, concl, params, calc)
    except RuleError as e:
        raise TransformError(str(e)) from None
    kids = tuple(kids)
    if len(kids) != len(inst.premises):
        raise TransformError(f"{rule}: wrong number of premises")
    for p, k in zip(inst.premises, kids):
        if p != k.conclusion:
            raise TransformError(f"{rule}: premise mismatch\n  want {p}\n  got  {k.conclusion}")
    return Derivation(inst, kids)


# ------------------------------------------------------------------- ops


class Op:
    name = "op"
    avoid_vars: frozenset = frozenset()
    avoid_labels: frozenset = frozenset()

    def seq(self, s: Node) -> Node:
        raise NotImplementedError

    def label(self, w, s: Node):
        return w

    def formula(self, f):
        return f

    def var(self, x):
        return x

    def params(self, rule: str, p: Params, s: Node) -> Params:
        """Parameters of the rebuilt inference; s is the original conclusion."""
        def lab(x):
            return None if x is None else self.label(x, s)

        return Params(
            w=lab(p.w),
            formula=None if p.formula is None else self.formula(p.formula),
            u=lab(p.u),
            v=lab(p.v),
            var=None if p.var is None else self.var(p.var),
            labels=tuple(lab(x) for x in p.labels),
        )

    def kid(self, d: Derivation, i: int) -> "Op":
        return self

    def intercept(self, d: Derivation) -> bool:
        """True when the special hook must handle d before the generic attempt."""
        return False

    def special(self, d: Derivation, ctx: Ctx) -> Derivation | None:
        return None


def run(op: Op, d: Derivation, ctx: Ctx) -> Derivation:
    d = freshen(d, op.avoid_vars, op.avoid_labels, ctx)
    return _perm(d, op, ctx)


def _generic(d: Derivation, op: Op, ctx: Ctx):
    """(instance, kid ops) when the op commutes with d's last inference."""
    if op.intercept(d):
        return None
    try:
        concl = op.seq(d.conclusion)
        inst = C.build(d.rule, concl, op.params(d.rule, d.params, d.conclusion), ctx.calc)
        if len(inst.premises) != len(d.children):
            return None
        kops = [op.kid(d, i) for i in range(len(d.children))]
        for prem, k, c in zip(inst.premises, kops, d.children):
            if k.seq(c.conclusion) != prem:
                return None
        return inst, kops
    except (RuleError, KeyError, ValueError):
        return None


def _perm(d: Derivation, op: Op, ctx: Ctx) -> Derivation:
    g = _generic(d, op, ctx)
    if g is not None:
        inst, kops = g
        return Derivation(inst, tuple(_perm(c, k, ctx) for c, k in zip(d.children, kops)))
    out = op.special(d, ctx)
    if out is None and d.rule in C.INITIAL:
        # a leaf stays a leaf when the new conclusion is still axiomatic
        try:
            ax = C.is_axiomatic(op.seq(d.conclusion), ctx.calc)
        except (KeyError, ValueError):
            ax = None
        out = None if ax is None else Derivation(ax)
    if out is None:
        raise TransformError(f"{op.name} does not permute over {d.rule} at {d.conclusion}")
    try:
        want = op.seq(d.conclusion)
    except (KeyError, ValueError) as e:
        raise TransformError(f"{op.name} not applicable: {e}") from None
    if out.conclusion != want:
        raise TransformError(f"{op.name}/{d.rule}: produced {out.conclusion}, wanted {want}")
    return out


def freshen(d: Derivation, avoid_vars, avoid_labels, ctx: Ctx) -> Derivation:
    """Rename eigenvariables and eigenlabels of d that clash with the given names."""
    if not avoid_vars and not avoid_labels:
        return d
    from .ops import LS, PS

    def go(n: Derivation) -> Derivation:
        inst = n.inst
        fv, fl = inst.fresh_var(), inst.fresh_label()
        kids = n.children
        if (fv and fv in avoid_vars) or (fl is not None and fl in avoid_labels):
            p = inst.params
            child = kids[0]
            if fv and fv in avoid_vars:
                nv = ctx.fresh.var(fv)
                child = _perm(child, PS(fv, nv), ctx)
                p = replace(p, var=nv)
            if fl is not None and fl in avoid_labels:
                nl = ctx.fresh.label()
                child = _perm(child, LS(fl, nl), ctx)
                p = replace(p, u=nl)
            n = assemble(inst.rule, inst.conclusion, p, (child,), ctx.calc)
            kids = n.children
        new = tuple(go(k) for k in kids)
        if all(a is b for a, b in zip(new, kids)):
            return n
        return Derivation(n.inst, new)

    return go(d)


# --------------------------------------------------------------- helpers


def forms_at(s: Node, w: int) -> Counter:
    return Counter(s.find(w).forms)


def remove_forms(s: Node, w: int, pfs) -> Node:
    def f(n: Node) -> Node:
        for pf in pfs:
            n = n.remove(pf)
        return n

    return S.update_at(s, w, f)


def add_forms(s: Node, w: int, pfs) -> Node:
    return S.update_at(s, w, lambda n: n.add(*pfs))


def remove_vars(s: Node, w: int, xs) -> Node:
    def f(n: Node) -> Node:
        for x in xs:
            if x not in n.sig:
                raise KeyError(f"{x} not in signature of {S.label_name(w)}")
            n = n.remove_var(x)
        return n

    return S.update_at(s, w, f)


def add_vars(s: Node, w: int, xs) -> Node:
    return S.update_at(s, w, lambda n: n.add(sig=xs))


def multiset_minus(a: list[PF], b: list[PF]) -> list[PF]:
    out = list(a)
    for x in b:
        out.remove(x)
    return out


def diff_at(before: Node, after: Node, w: int) -> tuple[list[PF], list[PF]]:
    """(removed, added) formula occurrences at w going from before to after."""
    a, b = Counter(before.find(w).forms), Counter(after.find(w).forms)
    return list((a - b).elements()), list((b - a).elements())


def subst_node(s: Node, y: str, x: str) -> Node:
    """s(y/x): every free x, in formulas and signatures, becomes y."""
    return s.map_nodes(
        lambda n: Node(
            n.label,
            tuple(y if v == x else v for v in n.sig),
            tuple(PF(F.substitute(p.formula, y, x), p.pol) for p in n.forms),
            n.children,
        )
    )


def relabel_node(s: Node, m: dict[int, int]) -> Node:
    return s.map_nodes(lambda n: n.with_(label=m.get(n.label, n.label)))
