"""Drop inferences whose added formulas are never used above them."""

from __future__ import annotations

from .. import calculus as C
from ..calculus import Calculus
from ..derivation import Derivation
from .engine import Ctx, TransformError, context, diff_at, run
from .ops import Strip

# rules whose premises are the conclusion plus new formulas at one label
_ADDING = {C.IMP_L, C.EX_R1, C.ALL_L1}


def prune(d: Derivation, calc: Calculus) -> Derivation:
    """A derivation of the same conclusion, no higher, with redundant steps removed.

    An inference of imp_l, ex_r1 or all_l1 whose premise derivation never uses
    the formula that premise adds is replaced by that derivation, stripped of
    the formula.
    """
    return _prune(d, context(d, calc))


def _added(d: Derivation, i: int):
    prem = d.inst.premises[i]
    out = []
    for w in d.conclusion.labels():
        removed, added = diff_at(d.conclusion, prem, w)
        if removed:
            return None
        out += [(w, pf) for pf in added]
    return out if len(out) == 1 else None


def _skip(d: Derivation, ctx: Ctx) -> Derivation | None:
    for i, kid in enumerate(d.children):
        add = _added(d, i)
        if add is None:
            continue
        w, pf = add[0]
        try:
            return run(Strip(w, [pf]), kid, ctx)
        except (TransformError, KeyError, ValueError):
            continue
    return None


def _prune(d: Derivation, ctx: Ctx) -> Derivation:
    while d.rule in _ADDING:
        shorter = _skip(d, ctx)
        if shorter is None:
            break
        d = shorter
    kids = tuple(_prune(k, ctx) for k in d.children)
    if all(a is b for a, b in zip(kids, d.children)):
        return d
    return Derivation(d.inst, kids)
