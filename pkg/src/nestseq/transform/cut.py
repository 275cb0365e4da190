"""Syntactic cut elimination for the intuitionistic calculi (I, ND, CD).

Cuts are removed topmost first.  A single cut is reduced by induction on
the complexity of the cut formula and the sum of the premise heights: when
the cut formula is not principal on one side the cut moves up that side
(inverting the other premise to match contexts), otherwise the principal
reduction for its main connective replaces it by cuts on its components.
"""

from __future__ import annotations

from .. import calculus as C
from .. import formula as F
from .. import sequent as S
from ..calculus import Calculus, Params
from ..derivation import Derivation
from ..formula import Formula
from ..sequent import IN, OUT, PF, Node
from .engine import Ctx, TransformError, add_forms, add_vars, assemble, context, run
from .ops import PS, Cd, Cv, FreshDelete, Lwr, Mrg, Nd, Strip, Wk, Wv, invert_op


def has_cut(d: Derivation) -> bool:
    return any(n.rule == C.CUT for n in d.nodes())


def eliminate_cut(d: Derivation, calc: Calculus) -> Derivation:
    if calc.gd_family:
        raise TransformError(f"cut elimination for {calc.logic} is not supported")
    if calc.extended:
        raise TransformError("cut elimination with extension rules is not supported")
    if not has_cut(d):
        return d
    base = Calculus(calc.logic, calc.regime, calc.rules)
    ctx = context(d, base)
    return _elim(d, ctx)


def _elim(d: Derivation, ctx: Ctx) -> Derivation:
    if not has_cut(d):
        return d
    kids = tuple(_elim(k, ctx) for k in d.children)
    if d.rule == C.CUT:
        p = d.params
        return _reduce(kids[0], kids[1], p.w, p.formula, d.conclusion, ctx)
    return Derivation(d.inst, kids)


# ------------------------------------------------------------ principality


def _principal_out(d: Derivation, w: int, f: Formula) -> bool:
    p = d.params
    if d.rule in (C.ID, C.ID_Q):
        return p.u == w and PF(p.formula, OUT) == PF(f, OUT)
    pr = d.inst.principal
    return pr is not None and pr[0] == w and pr[1] == PF(f, OUT)


def _principal_in(d: Derivation, w: int, f: Formula) -> bool:
    p = d.params
    if d.rule in (C.ID, C.ID_Q):
        return p.w == w and PF(p.formula, IN) == PF(f, IN)
    pr = d.inst.principal
    return pr is not None and pr[0] == w and pr[1] == PF(f, IN)


# --------------------------------------------------------------- reduction


def _reduce(left: Derivation, right: Derivation, w: int, f: Formula, s: Node, ctx: Ctx) -> Derivation:
    """A cut-free derivation of s from cut-free proofs of s+f^o@w and s+f^i@w."""
    calc = ctx.calc
    ax = C.is_axiomatic(s, calc)
    if ax is not None:
        return Derivation(ax)
    for d, pf in ((left, PF(f, OUT)), (right, PF(f, IN))):
        unused = _strip(d, w, pf, ctx)
        if unused is not None:
            return unused
    if not _principal_out(left, w, f):
        return _permute(left, right, w, f, s, ctx, side=0)
    if not _principal_in(right, w, f):
        return _permute(right, left, w, f, s, ctx, side=1)
    return _principal(left, right, w, f, s, ctx)


def _strip(d: Derivation, w: int, pf: PF, ctx: Ctx) -> Derivation | None:
    """d without the cut occurrence, when that occurrence is never used."""
    try:
        return run(Strip(w, [pf]), d, ctx)
    except (TransformError, KeyError, ValueError):
        return None


def _permute(active: Derivation, other: Derivation, w, f, s, ctx, side: int) -> Derivation:
    """Move the cut above the last inference of ``active`` (left if side == 0)."""
    r, p = active.rule, active.params
    if r in C.INITIAL or not active.children:
        raise TransformError(f"cut: unexpected leaf {r} with a non-axiomatic conclusion")
    others = invert_op(other, r, p, ctx)
    goal = C.build(r, s, p, ctx.calc)
    kids = []
    for prem, a, o in zip(goal.premises, active.children, others):
        lt, rt = (a, o) if side == 0 else (o, a)
        kids.append(_reduce(lt, rt, w, f, prem, ctx))
    return assemble(r, s, p, kids, ctx.calc)


def _drop_copy(d: Derivation, z: str, u: int, ctx: Ctx) -> Derivation:
    """Remove the extra copy of z sitting at u, where z is otherwise available for u."""
    if ctx.calc.regime == "CD":
        return run(Cd(u, [z]), d, ctx)
    s = d.conclusion
    home = next(a for a in S.ancestors_or_self(s, u) if z in s.find(a).sig and (a != u or s.find(u).sig.count(z) >= 2))
    if home != u:
        d = run(Nd(home, u, [z]), d, ctx)
    return run(Cv(home, z), d, ctx)


def _open_universal(d: Derivation, w: int, u: int, f: F.Forall, z: str, ctx: Ctx) -> Derivation:
    """From a proof of s+(forall x A)^o@w build one of s+z@u+A(z)^o@u."""
    if w != u:
        d = run(Lwr(w, u, [PF(f, OUT)]), d, ctx)
    c, y = ctx.fresh.label(), ctx.fresh.var(f.var)
    d = invert_op(d, C.ALL_R, Params(w=u, formula=f, u=c, var=y), ctx)[0]
    d = run(Mrg(c), d, ctx)
    return run(PS(y, z), d, ctx)


def _principal(left: Derivation, right: Derivation, w: int, f: Formula, s: Node, ctx: Ctx) -> Derivation:
    calc = ctx.calc
    rp = right.params
    if isinstance(f, F.Atom):
        a = left.params.w
        if right.rule in (C.ID, C.ID_Q):
            rule = C.ID_Q if calc.first_order else C.ID
            return assemble(rule, s, Params(w=a, formula=f, u=rp.u), (), calc)
        if right.rule == C.DS:
            xs = list(f.args)
            sx = add_vars(s, a, xs)
            lt = run(Wv(a, xs), left, ctx)
            rt = right.children[0]
            if a != w:
                rt = run(Nd(a, w, xs), rt, ctx)
            inner = _reduce(lt, rt, w, f, sx, ctx)
            return assemble(C.DS, s, Params(w=a, formula=f), (inner,), calc)
        raise TransformError(f"cut: atomic cut against {right.rule}")

    if isinstance(f, F.Or):
        a, b = f.left, f.right
        r0 = run(Wk(w, [PF(b, OUT)]), right.children[0], ctx)
        d1 = _reduce(left.children[0], r0, w, a, add_forms(s, w, [PF(b, OUT)]), ctx)
        return _reduce(d1, right.children[1], w, b, s, ctx)

    if isinstance(f, F.And):
        a, b = f.left, f.right
        l1 = run(Wk(w, [PF(a, IN)]), left.children[1], ctx)
        d1 = _reduce(l1, right.children[0], w, b, add_forms(s, w, [PF(a, IN)]), ctx)
        return _reduce(left.children[0], d1, w, a, s, ctx)

    if isinstance(f, F.Imp):
        a, b, u = f.left, f.right, rp.u
        d1 = _reduce(run(Wk(u, [PF(a, OUT)]), left, ctx), right.children[0], w, f, add_forms(s, u, [PF(a, OUT)]), ctx)
        d2 = _reduce(run(Wk(u, [PF(b, IN)]), left, ctx), right.children[1], w, f, add_forms(s, u, [PF(b, IN)]), ctx)
        m = left
        if w != u:
            m = run(Lwr(w, u, [PF(f, OUT)]), m, ctx)
        c = ctx.fresh.label()
        m = invert_op(m, C.IMP_R, Params(w=u, formula=f, u=c), ctx)[0]
        m = run(Mrg(c), m, ctx)
        d1 = run(Wk(u, [PF(b, OUT)]), d1, ctx)
        d3 = _reduce(d1, m, u, a, add_forms(s, u, [PF(b, OUT)]), ctx)
        return _reduce(d3, d2, u, b, s, ctx)

    if isinstance(f, F.Forall):
        u, z = rp.u, rp.var
        inst = F.substitute(f.body, z, f.var)
        if right.rule == C.ALL_L1:
            d2 = _reduce(run(Wk(u, [PF(inst, IN)]), left, ctx), right.children[0], w, f, add_forms(s, u, [PF(inst, IN)]), ctx)
            m = _drop_copy(_open_universal(left, w, u, f, z, ctx), z, u, ctx)
            return _reduce(m, d2, u, inst, s, ctx)
        if right.rule == C.ALL_L2:
            v = rp.v
            sz = add_vars(s, v, [z])
            lz = run(Wv(v, [z]), left, ctx)
            d2 = _reduce(run(Wk(u, [PF(inst, IN)]), lz, ctx), right.children[0], w, f, add_forms(sz, u, [PF(inst, IN)]), ctx)
            m = _drop_copy(_open_universal(lz, w, u, f, z, ctx), z, u, ctx)
            d3 = _reduce(m, d2, u, inst, sz, ctx)
            return run(FreshDelete(z, v), d3, ctx)
        raise TransformError(f"cut: universal cut against {right.rule}")

    if isinstance(f, F.Exists):
        lp = left.params
        z = lp.var
        inst = F.substitute(f.body, z, f.var)
        y = rp.var
        if left.rule == C.EX_R1:
            d2 = _reduce(left.children[0], run(Wk(w, [PF(inst, OUT)]), right, ctx), w, f, add_forms(s, w, [PF(inst, OUT)]), ctx)
            m = _drop_copy(run(PS(y, z), right.children[0], ctx), z, w, ctx)
            return _reduce(d2, m, w, inst, s, ctx)
        if left.rule == C.EX_R2:
            v = lp.v
            sz = add_vars(s, v, [z])
            rz = run(Wv(v, [z]), right, ctx)
            d2 = _reduce(left.children[0], run(Wk(w, [PF(inst, OUT)]), rz, ctx), w, f, add_forms(sz, w, [PF(inst, OUT)]), ctx)
            m = run(Wv(v, [z]), run(PS(y, z), right.children[0], ctx), ctx)
            m = _drop_copy(m, z, w, ctx)
            d3 = _reduce(d2, m, w, inst, sz, ctx)
            return run(FreshDelete(z, v), d3, ctx)
        raise TransformError(f"cut: existential cut against {left.rule}")

    raise TransformError(f"cut: no principal reduction for {F.show(f)}")
