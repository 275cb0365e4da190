"""The admissible structural rules as permutable operations.

Each class is one rule read top-down: ``seq`` maps the premise sequent to
the conclusion.  Pushing an operation up a derivation leaves every inference
in place except those handled by ``special``, which follow the usual
inductive arguments (contraction via inversion, lowering an implication via
a subtree move, and so on).
"""

from __future__ import annotations

from dataclasses import replace

from .. import calculus as C
from .. import formula as F
from .. import sequent as S
from ..calculus import Params
from ..derivation import Derivation
from ..sequent import IN, OUT, PF, Node
from .engine import (
    Ctx,
    Op,
    TransformError,
    _perm,
    add_forms,
    add_vars,
    assemble,
    diff_at,
    multiset_minus,
    relabel_node,
    remove_forms,
    remove_vars,
    subst_node,
)


def _require(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


def _principal_is(d: Derivation, w: int, pf: PF) -> bool:
    pr = d.inst.principal
    return pr is not None and pr[0] == w and pr[1] == pf


# ------------------------------------------------------------ renamings


class PS(Op):
    """Substitute y for the free variable x everywhere."""

    name = "ps"

    def __init__(self, x: str, y: str):
        self.x, self.y = x, y
        self.avoid_vars = frozenset({x, y})

    def seq(self, s):
        return subst_node(s, self.y, self.x)

    def formula(self, f):
        return F.substitute(f, self.y, self.x)

    def var(self, z):
        return self.y if z == self.x else z


class LS(Op):
    """Rename label u to the fresh label v."""

    name = "ls"

    def __init__(self, u: int, v: int):
        self.u, self.v = u, v
        self.avoid_labels = frozenset({v})

    def seq(self, s):
        _require(s.has(self.u), f"no label {S.label_name(self.u)}")
        _require(not s.has(self.v), f"{S.label_name(self.v)} is not fresh")
        return relabel_node(s, {self.u: self.v})

    def label(self, w, s):
        return self.v if w == self.u else w


class Nest(Op):
    """Wrap the whole sequent as the only child of a new empty root."""

    name = "n"

    def __init__(self, u: int):
        self.u = u
        self.avoid_labels = frozenset({u})

    def seq(self, s):
        _require(not s.has(self.u) and self.u != S.ROOT, f"{S.label_name(self.u)} is not fresh")
        return Node(S.ROOT, (), (), (relabel_node(s, {S.ROOT: self.u}),))

    def label(self, w, s):
        return self.u if w == S.ROOT else w


# ----------------------------------------------------------- weakenings


class Wk(Op):
    name = "wk"

    def __init__(self, w: int, pfs):
        self.w, self.pfs = w, tuple(pfs)
        self.avoid_vars = frozenset(x for p in self.pfs for x in F.free_vars(p.formula))

    def seq(self, s):
        return add_forms(s, self.w, self.pfs)


class Strip(Op):
    """Delete formula occurrences that the derivation never uses."""

    name = "strip"

    def __init__(self, w: int, pfs):
        self.w, self.pfs = w, tuple(pfs)

    def seq(self, s):
        return remove_forms(s, self.w, self.pfs)


class Wv(Op):
    name = "wv"

    def __init__(self, w: int, xs):
        self.w, self.xs = w, tuple(xs)
        self.avoid_vars = frozenset(self.xs)

    def seq(self, s):
        return add_vars(s, self.w, self.xs)


class BotR(Op):
    name = "bot_r"

    def __init__(self, w: int):
        self.w = w

    def seq(self, s):
        return remove_forms(s, self.w, [PF(F.BOT, OUT)])


class Cv(Op):
    """Contract a duplicated variable in a signature."""

    name = "cv"

    def __init__(self, w: int, x: str):
        self.w, self.x = w, x

    def seq(self, s):
        _require(s.find(self.w).sig.count(self.x) >= 2, f"{self.x} is not duplicated at {S.label_name(self.w)}")
        return remove_vars(s, self.w, [self.x])


class Nd(Op):
    """Move variables up from u to a strict ancestor w."""

    name = "nd"

    def __init__(self, w: int, u: int, xs):
        self.w, self.u, self.xs = w, u, tuple(xs)

    def seq(self, s):
        _require(S.strictly_reachable(s, self.w, self.u), "nd: needs w strictly above u")
        return add_vars(remove_vars(s, self.u, self.xs), self.w, self.xs)


class Dd(Op):
    """Move variables down from w to a strict descendant u."""

    name = "dd"

    def __init__(self, w: int, u: int, xs):
        self.w, self.u, self.xs = w, u, tuple(xs)

    def seq(self, s):
        _require(S.strictly_reachable(s, self.w, self.u), "dd: needs w strictly above u")
        return add_vars(remove_vars(s, self.w, self.xs), self.u, self.xs)


class Cd(Op):
    """Delete variables from a signature."""

    name = "cd"

    def __init__(self, w: int, xs):
        self.w, self.xs = w, tuple(xs)

    def seq(self, s):
        return remove_vars(s, self.w, self.xs)


# ------------------------------------------------------- tree surgery


class Mrg(Op):
    """Fuse node u into its parent."""

    name = "mrg"

    def __init__(self, u: int):
        self.u = u

    def seq(self, s):
        return S.merge_into_parent(s, self.u)

    def label(self, w, s):
        return S.parents(s)[self.u] if w == self.u else w

    def special(self, d, ctx):
        p = d.params
        if d.rule == C.LIN and self.u in (p.u, p.v):
            # keep the premise in which the sibling sits inside u
            return _perm(d.children[0 if self.u == p.u else 1], self, ctx)
        return None


class Ec(Op):
    """Fuse sibling v into u."""

    name = "ec"

    def __init__(self, u: int, v: int):
        self.u, self.v = u, v

    def seq(self, s):
        par = S.parents(s)
        _require(self.u != self.v and par.get(self.u) is not None and par.get(self.u) == par.get(self.v), "ec: needs two siblings")
        return S.merge_siblings(s, self.u, self.v)

    def label(self, w, s):
        return self.u if w == self.v else w

    def special(self, d, ctx):
        p = d.params
        if d.rule == C.LIN and {p.u, p.v} == {self.u, self.v}:
            return _perm(d.children[0 if p.u == self.u else 1], Mrg(self.v), ctx)
        return None


class Ex(Op):
    """Insert a fresh empty node u between v and its parent."""

    name = "ex"

    def __init__(self, v: int, u: int):
        self.v, self.u = v, u
        self.avoid_labels = frozenset({u})

    def seq(self, s):
        _require(not s.has(self.u), f"{S.label_name(self.u)} is not fresh")
        parent = S.parents(s)[self.v]
        rest, sub = S.detach(s, self.v)
        return S.attach(rest, parent, Node(self.u, (), (), (sub,)))

    def special(self, d, ctx):
        p = d.params
        if d.rule != C.LIN or self.v not in (p.u, p.v):
            return None
        # two lin steps: one at the new node, one at the old parent
        x = p.v if self.v == p.u else p.u
        left, right = (d.children[0], d.children[1]) if self.v == p.u else (d.children[1], d.children[0])
        concl = self.seq(d.conclusion)
        top = C.build(C.LIN, concl, Params(w=p.w, u=self.u, v=x), ctx.calc)
        a = _perm(left, Ex(self.v, self.u), ctx)
        b = _perm(right, Ex(x, self.u), ctx)
        mid = assemble(C.LIN, top.premises[0], Params(w=self.u, u=self.v, v=x), (a, b), ctx.calc)
        c = _perm(right, Ex(self.v, self.u), ctx)
        return assemble(C.LIN, concl, top.params, (mid, c), ctx.calc)


def relocate(d: Derivation, c: int, u: int, ctx: Ctx) -> Derivation:
    """Move the subtree at c (a child of some w) below u, for w strictly above u.

    Realised as ex applied k times followed by ec k times, k being the
    distance from w to u.
    """
    s = d.conclusion
    w = S.parents(s)[c]
    path = S.ancestors_or_self(s, u)
    if w not in path or w == u or c in path:
        raise TransformError("relocate: target must lie strictly below the parent and outside the subtree")
    below = path[path.index(w) + 1 :]
    qs = [ctx.fresh.label() for _ in below]
    for q in qs:
        d = _perm(d, Ex(c, q), ctx)
    for p, q in zip(below, qs):
        d = _perm(d, Ec(p, q), ctx)
    return d


# --------------------------------------------------------- moving formulas


class Lwr(Op):
    """Move output formulas from w down to u (w reaches u)."""

    name = "lwr"

    def __init__(self, w: int, u: int, pfs):
        self.w, self.u, self.pfs = w, u, tuple(pfs)

    def seq(self, s):
        _require(all(p.pol is OUT for p in self.pfs), "lwr moves output formulas")
        _require(S.reachable(s, self.w, self.u), "lwr: u not reachable from w")
        return add_forms(remove_forms(s, self.w, self.pfs), self.u, self.pfs)

    def special(self, d, ctx):
        pr = d.inst.principal
        if pr is None or pr[0] != self.w or pr[1] not in self.pfs:
            return None
        pf, p, s = pr[1], d.params, d.conclusion
        concl = self.seq(s)
        if d.rule in (C.IMP_R, C.ALL_R):
            rest = multiset_minus(list(self.pfs), [pf])
            kid = d.children[0]
            if rest:
                kid = _perm(kid, Lwr(self.w, self.u, rest), ctx)
            if self.w != self.u:
                kid = relocate(kid, p.u, self.u, ctx)
            return assemble(d.rule, concl, replace(p, w=self.u), (kid,), ctx.calc)
        kids = []
        for prem, kid in zip(d.inst.premises, d.children):
            removed, added = diff_at(s, prem, self.w)
            moved = multiset_minus(list(self.pfs), removed) + [a for a in added if a.pol is OUT]
            kids.append(_perm(kid, Lwr(self.w, self.u, moved), ctx))
        return assemble(d.rule, concl, replace(p, w=self.u), kids, ctx.calc)


class Lft(Op):
    """Move input formulas from u up to w (w reaches u)."""

    name = "lft"

    def __init__(self, w: int, u: int, pfs):
        self.w, self.u, self.pfs = w, u, tuple(pfs)

    def seq(self, s):
        _require(all(p.pol is IN for p in self.pfs), "lft moves input formulas")
        _require(S.reachable(s, self.w, self.u), "lft: u not reachable from w")
        return add_forms(remove_forms(s, self.u, self.pfs), self.w, self.pfs)

    def special(self, d, ctx):
        pr = d.inst.principal
        if pr is None or pr[0] != self.u or pr[1] not in self.pfs:
            return None
        p, s = d.params, d.conclusion
        concl = self.seq(s)
        newp = replace(p, w=self.w)
        if d.rule in (C.IMP_L, C.ALL_L1):
            kids = [_perm(k, self, ctx) for k in d.children]
            return assemble(d.rule, concl, newp, kids, ctx.calc)
        if d.rule == C.ALL_L2:
            kid = _perm(d.children[0], self, ctx)
            if ctx.calc.regime == "ND" and not S.reachable(concl, p.v, self.w):
                kid = _perm(kid, Nd(self.w, p.v, [p.var]), ctx)
                newp = replace(newp, v=self.w)
            return assemble(d.rule, concl, newp, (kid,), ctx.calc)
        if d.rule == C.DS:
            kid = _perm(_perm(d.children[0], self, ctx), Nd(self.w, self.u, p.formula.args), ctx)
            return assemble(d.rule, concl, newp, (kid,), ctx.calc)
        kids = []
        for prem, kid in zip(d.inst.premises, d.children):
            removed, added = diff_at(s, prem, self.u)
            moved = multiset_minus(list(self.pfs), removed) + added
            kid = _perm(kid, Lft(self.w, self.u, moved), ctx)
            if d.rule == C.EX_L:
                kid = _perm(kid, Nd(self.w, self.u, [p.var]), ctx)
            kids.append(kid)
        return assemble(d.rule, concl, newp, kids, ctx.calc)


# ------------------------------------------------------------ contraction


class Ctr(Op):
    """Contract two copies of a polarized formula at w."""

    def __init__(self, w: int, pf: PF):
        self.w, self.pf = w, pf
        self.name = "ctr_in" if pf.pol is IN else "ctr_out"

    def seq(self, s):
        _require(s.find(self.w).count(self.pf) >= 2, f"{self.name}: {self.pf} is not duplicated at {S.label_name(self.w)}")
        return remove_forms(s, self.w, [self.pf])

    def special(self, d, ctx):
        if not _principal_is(d, self.w, self.pf):
            return None
        w, f, p = self.w, self.pf.formula, d.params
        concl = self.seq(d.conclusion)
        calc = ctx.calc
        r = d.rule
        if r in (C.OR_L, C.AND_R):
            kids = []
            for i, kid in enumerate(d.children):
                part = f.left if i == 0 else f.right
                inv = invert_op(kid, r, Params(w=w, formula=f), ctx)[i]
                kids.append(_perm(inv, Ctr(w, PF(part, self.pf.pol)), ctx))
            return assemble(r, concl, p, kids, calc)
        if r in (C.AND_L, C.OR_R):
            inv = invert_op(d.children[0], r, Params(w=w, formula=f), ctx)[0]
            pol = self.pf.pol
            inv = _perm(inv, Ctr(w, PF(f.left, pol)), ctx)
            inv = _perm(inv, Ctr(w, PF(f.right, pol)), ctx)
            return assemble(r, concl, p, (inv,), calc)
        if r == C.EX_L:
            y2 = ctx.fresh.var(p.var)
            inv = invert_op(d.children[0], r, Params(w=w, formula=f, var=y2), ctx)[0]
            inv = _perm(inv, PS(y2, p.var), ctx)
            body = F.substitute(f.body, p.var, f.var)
            inv = _perm(inv, Ctr(w, PF(body, IN)), ctx)
            inv = _perm(inv, Cv(w, p.var), ctx)
            return assemble(r, concl, p, (inv,), calc)
        if r in (C.IMP_R, C.ALL_R):
            c = p.u
            kid = _perm(d.children[0], Lwr(w, c, [self.pf]), ctx)
            c2 = ctx.fresh.label()
            y2 = ctx.fresh.var(p.var) if r == C.ALL_R else None
            kid = invert_op(kid, r, Params(w=c, formula=f, u=c2, var=y2), ctx)[0]
            kid = _perm(kid, Mrg(c2), ctx)
            if r == C.IMP_R:
                kid = _perm(kid, Ctr(c, PF(f.left, IN)), ctx)
                kid = _perm(kid, Ctr(c, PF(f.right, OUT)), ctx)
            else:
                kid = _perm(kid, PS(y2, p.var), ctx)
                kid = _perm(kid, Ctr(c, PF(F.substitute(f.body, p.var, f.var), OUT)), ctx)
                kid = _perm(kid, Cv(c, p.var), ctx)
            return assemble(r, concl, p, (kid,), calc)
        return None


# -------------------------------------------------------------- inversion


class Invert(Op):
    """Replace the principal formula of a rule by the premise-i material."""

    def __init__(self, rule: str, params: Params, i: int, calc):
        self.rule, self.p, self.i, self.calc = rule, params, i, calc
        self.name = f"invert({rule})"
        self.avoid_vars = frozenset({params.var} if params.var and rule in (C.EX_L, C.ALL_R) else ())
        self.avoid_labels = frozenset({params.u} if rule in (C.IMP_R, C.ALL_R) else ())

    def seq(self, s):
        try:
            return C.build(self.rule, s, self.p, self.calc).premises[self.i]
        except C.RuleError as e:
            raise ValueError(str(e)) from None

    def special(self, d, ctx):
        pf = self.p.principal(self.rule)
        if d.rule != self.rule or not _principal_is(d, self.p.w, pf):
            return None
        kid = d.children[self.i]
        p = d.params
        if self.rule in (C.IMP_R, C.ALL_R) and p.u != self.p.u:
            kid = _perm(kid, LS(p.u, self.p.u), ctx)
        if self.rule in (C.EX_L, C.ALL_R) and p.var != self.p.var:
            kid = _perm(kid, PS(p.var, self.p.var), ctx)
        return kid


WEAKENING_INVERSES = {C.IMP_L, C.DS, C.EX_R1, C.EX_R2, C.ALL_L1, C.ALL_L2}


def invert_op(d: Derivation, rule: str, params: Params, ctx: Ctx) -> list[Derivation]:
    """Derivations of each premise of the rule instance whose conclusion is d's."""
    from .engine import run

    inst = C.build(rule, d.conclusion, params, ctx.calc)
    if rule in WEAKENING_INVERSES:
        out = []
        for prem in inst.premises:
            kid = d
            for n in prem.nodes():
                old = d.conclusion.find(n.label)
                extra_vars = list(n.sig)
                for x in old.sig:
                    extra_vars.remove(x)
                extra = multiset_minus(list(n.forms), list(old.forms))
                if extra_vars:
                    kid = run(Wv(n.label, extra_vars), kid, ctx)
                if extra:
                    kid = run(Wk(n.label, extra), kid, ctx)
            out.append(kid)
        return out
    if rule not in C.LOGICAL:
        raise TransformError(f"no inversion for {rule}")
    return [run(Invert(rule, params, i, ctx.calc), d, ctx) for i in range(len(inst.premises))]


# -------------------------------------------------------- fresh deletion


class FreshDelete(Op):
    """Drop an otherwise unused variable y from the signature at v."""

    name = "fresh_delete"

    def __init__(self, y: str, v: int):
        self.y, self.v = y, v

    def seq(self, s):
        return remove_vars(s, self.v, [self.y])

    def intercept(self, d):
        return d.rule in (C.EX_R1, C.ALL_L1) and d.params.var == self.y

    def special(self, d, ctx):
        if not self.intercept(d):
            return None
        p, calc, kid = d.params, ctx.calc, d.children[0]
        concl = self.seq(d.conclusion)
        if d.rule == C.EX_R1:
            return assemble(C.EX_R2, concl, Params(w=p.w, formula=p.formula, v=self.v, var=self.y), (kid,), calc)
        if calc.regime != "ND" or S.reachable(concl, self.v, p.w):
            return assemble(C.ALL_L2, concl, Params(w=p.w, formula=p.formula, u=p.u, v=self.v, var=self.y), (kid,), calc)
        # the universal sits above v: instantiate a copy placed at v, then lift and contract it
        pf = PF(p.formula, IN)
        kid = _perm(kid, Wk(self.v, [pf]), ctx)
        mid = add_forms(concl, self.v, [pf])
        step = assemble(C.ALL_L2, mid, Params(w=self.v, formula=p.formula, u=p.u, v=self.v, var=self.y), (kid,), calc)
        step = _perm(step, Lft(p.w, self.v, [pf]), ctx)
        return _perm(step, Ctr(p.w, pf), ctx)
