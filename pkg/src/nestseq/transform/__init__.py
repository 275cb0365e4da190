"""Proof rewrites: admissible rules, inversion, fresh deletion, cut elimination.

Every public function takes a derivation and a calculus and returns a new
derivation of the rule's conclusion that checks in that calculus.  In the
GD family the rules ex, ec, lwr and ctr_out are only admissible (not
height-preserving); ``admissible`` first tries the permutation argument and
otherwise re-proves the conclusion, marking the result as reproved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import calculus as C
from .. import formula as F
from .. import sequent as S
from ..calculus import Calculus, Params
from ..derivation import Derivation, check
from ..sequent import IN, OUT, PF, Node
from .cut import eliminate_cut, has_cut
from .engine import Ctx, Op, TransformError, context, remove_vars, run
from .prune import prune
from .ops import (
    LS,
    PS,
    BotR,
    Cd,
    Cv,
    Ctr,
    Dd,
    Ec,
    Ex,
    FreshDelete,
    Invert,
    Lft,
    Lwr,
    Mrg,
    Nd,
    Nest,
    Wk,
    Wv,
    invert_op,
    relocate,
)

__all__ = [
    "TransformError",
    "TransformRequest",
    "TransformResult",
    "RULES",
    "admissible",
    "apply_request",
    "bot_r",
    "cd",
    "ctr_in",
    "ctr_out",
    "cv",
    "dd",
    "ec",
    "eliminate_cut",
    "ex",
    "fresh_delete",
    "has_cut",
    "invert",
    "lft",
    "ls",
    "lwr",
    "mrg",
    "n",
    "nd",
    "prune",
    "ps",
    "reprove",
    "wk",
    "wv",
]

# which calculi each rule is stated for
_ALL = set(C.LOGICS)
_FO = {"ND", "CD", "GN", "GC"}
SCOPE = {
    "wk": _ALL,
    "bot_r": _ALL,
    "ps": _ALL,
    "ls": _ALL,
    "n": _ALL,
    "ctr_in": _ALL,
    "lft": _ALL,
    "mrg": _ALL,
    "ex": _ALL,
    "ec": _ALL,
    "lwr": _ALL,
    "ctr_out": _ALL,
    "wv": _FO,
    "cv": _FO,
    "nd": _FO,
    "dd": {"CD", "GC"},
    "cd": {"CD", "GC"},
    "fresh_delete": _FO,
    "cut": {"I", "ND", "CD"},
    "invert": _ALL,
}
RULES = tuple(SCOPE)
# admissible but not height-preserving in the GD family
GD_REPROVE = {"ex", "ec", "lwr", "ctr_out"}


def _pf(x) -> PF:
    if isinstance(x, PF):
        return x
    text = str(x).strip()
    if text.endswith("^i") or text.endswith("^o"):
        return PF(F.parse(text[:-2]), IN if text[-1] == "i" else OUT)
    raise ValueError(f"expected a polarized formula like 'p^o', got {x!r}")


def _label(x) -> int:
    return x if isinstance(x, int) else S.parse_label(str(x))


def _scope(rule: str, calc: Calculus):
    if calc.extended:
        raise TransformError("transforms are defined for the six base calculi only")
    if calc.logic not in SCOPE[rule]:
        raise TransformError(f"{rule} is not available for {calc.logic}")


def _run(op: Op, d: Derivation, calc: Calculus, *names) -> Derivation:
    ctx = context(d, calc, *names)
    try:
        return run(op, d, ctx)
    except (KeyError, ValueError) as e:
        if isinstance(e, TransformError):
            raise
        raise TransformError(f"{op.name}: {e}") from None


# --------------------------------------------------------- public rules


def wk(d: Derivation, calc: Calculus, w: int, forms) -> Derivation:
    _scope("wk", calc)
    return _run(Wk(w, [_pf(f) for f in forms]), d, calc)


def wv(d: Derivation, calc: Calculus, w: int, xs) -> Derivation:
    _scope("wv", calc)
    return _run(Wv(w, list(xs)), d, calc, set(xs))


def bot_r(d: Derivation, calc: Calculus, w: int) -> Derivation:
    _scope("bot_r", calc)
    return _run(BotR(w), d, calc)


def cv(d: Derivation, calc: Calculus, w: int, x: str) -> Derivation:
    _scope("cv", calc)
    return _run(Cv(w, x), d, calc)


def nd(d: Derivation, calc: Calculus, w: int, u: int, xs) -> Derivation:
    _scope("nd", calc)
    return _run(Nd(w, u, list(xs)), d, calc)


def dd(d: Derivation, calc: Calculus, w: int, u: int, xs) -> Derivation:
    _scope("dd", calc)
    return _run(Dd(w, u, list(xs)), d, calc)


def cd(d: Derivation, calc: Calculus, w: int, xs) -> Derivation:
    _scope("cd", calc)
    return _run(Cd(w, list(xs)), d, calc)


def ps(d: Derivation, calc: Calculus, x: str, y: str) -> Derivation:
    _scope("ps", calc)
    return _run(PS(x, y), d, calc, {x, y})


def ls(d: Derivation, calc: Calculus, u: int, v: int) -> Derivation:
    _scope("ls", calc)
    return _run(LS(u, v), d, calc, v)


def n(d: Derivation, calc: Calculus, u: int | None = None) -> Derivation:
    _scope("n", calc)
    if u is None:
        u = context(d, calc).fresh.label()
    return _run(Nest(u), d, calc, u)


def mrg(d: Derivation, calc: Calculus, u: int) -> Derivation:
    _scope("mrg", calc)
    return _run(Mrg(u), d, calc)


def ctr_in(d: Derivation, calc: Calculus, w: int, f) -> Derivation:
    _scope("ctr_in", calc)
    pf = PF(F.parse(f) if isinstance(f, str) else f, IN) if not isinstance(f, PF) else f
    return _run(Ctr(w, pf), d, calc)


def ctr_out(d: Derivation, calc: Calculus, w: int, f) -> Derivation:
    _scope("ctr_out", calc)
    pf = PF(F.parse(f) if isinstance(f, str) else f, OUT) if not isinstance(f, PF) else f
    return _run(Ctr(w, pf), d, calc)


def lft(d: Derivation, calc: Calculus, w: int, u: int, forms) -> Derivation:
    _scope("lft", calc)
    return _run(Lft(w, u, [_pf(f) for f in forms]), d, calc)


def lwr(d: Derivation, calc: Calculus, w: int, u: int, forms) -> Derivation:
    _scope("lwr", calc)
    return _run(Lwr(w, u, [_pf(f) for f in forms]), d, calc)


def ec(d: Derivation, calc: Calculus, u: int, v: int) -> Derivation:
    _scope("ec", calc)
    return _run(Ec(u, v), d, calc)


def ex(d: Derivation, calc: Calculus, v: int, u: int | None = None) -> Derivation:
    _scope("ex", calc)
    if u is None:
        u = context(d, calc).fresh.label()
    return _run(Ex(v, u), d, calc, u)


def fresh_delete(d: Derivation, y: str, calc: Calculus, label: int = S.ROOT) -> Derivation:
    """A derivation of the conclusion with y removed from the signature at label.

    y must not occur anywhere else in the conclusion.
    """
    _scope("fresh_delete", calc)
    s = d.conclusion
    if s.find(label).sig.count(y) != 1:
        raise TransformError(f"{y} is not in the signature of {S.label_name(label)}")
    if y in remove_vars(s, label, [y]).vars():
        raise TransformError(f"{y} occurs elsewhere in the conclusion")
    return _run(FreshDelete(y, label), d, calc)


def invert(rule: str, d: Derivation, calc: Calculus, params: Params) -> list[Derivation]:
    """Derivations of every premise of the rule instance (rule, params) on d's conclusion."""
    _scope("invert", calc)
    if rule == C.LIN:
        raise TransformError("lin has no inversion")
    if rule not in C.LOGICAL:
        raise TransformError(f"{rule} is not a logical rule")
    names = [x for x in (params.var,) if x] + ([params.u] if params.u is not None else [])
    ctx = context(d, calc, *names)
    try:
        return invert_op(d, rule, params, ctx)
    except C.RuleError as e:
        raise TransformError(f"invert({rule}): {e}") from None


def cut(d: Derivation, calc: Calculus) -> Derivation:
    _scope("cut", calc)
    return eliminate_cut(d, calc)


# -------------------------------------------------------------- fallback


def reprove(s: Node, calc: Calculus, budget=None) -> Derivation:
    from ..prover import Budget, Proved, prove

    res = prove(s, calc, budget or Budget())
    if not isinstance(res, Proved):
        raise TransformError(f"re-proving failed: {res.status}")
    if res.derivation.conclusion != s:
        raise TransformError("re-proving produced a different conclusion")
    return res.derivation


# ---------------------------------------------------------------- requests


@dataclass
class TransformRequest:
    """A rule name, the derivation to rewrite and the rule's arguments.

    Formulas are given as text (``"p -> q^o"``) or as a position
    ``[label, index]`` into the canonical order of that node's formulas.
    """

    rule: str
    derivation: Derivation
    args: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from ..derivation import to_json

        return {"rule": self.rule, "args": self.args, "derivation": to_json(self.derivation)}

    @classmethod
    def from_json(cls, data: dict) -> "TransformRequest":
        from ..derivation import from_json

        return cls(data["rule"], from_json(data["derivation"]), dict(data.get("args", {})))


@dataclass
class TransformResult:
    derivation: Derivation
    reproved: bool = False


def _forms(req: TransformRequest, key: str = "forms") -> list[PF]:
    out = []
    s = req.derivation.conclusion
    for item in req.args.get(key, []):
        if isinstance(item, (list, tuple)):
            w, i = item
            out.append(s.find(_label(w)).forms[int(i)])
        else:
            out.append(_pf(item))
    if "position" in req.args and key == "forms":
        w, i = req.args["position"]
        out.append(s.find(_label(w)).forms[int(i)])
    return out


def _one_form(req: TransformRequest) -> PF:
    a = req.args
    if "position" in a:
        w, i = a["position"]
        return req.derivation.conclusion.find(_label(w)).forms[int(i)]
    f = a["formula"]
    return f if isinstance(f, PF) else _pf(f)


def _dispatch(req: TransformRequest, calc: Calculus) -> Derivation:
    a, d, r = req.args, req.derivation, req.rule

    def lab(k, default=None):
        return _label(a[k]) if k in a else default

    if r == "wk":
        return wk(d, calc, lab("w", S.ROOT), _forms(req))
    if r == "wv":
        return wv(d, calc, lab("w", S.ROOT), a["vars"])
    if r == "bot_r":
        return bot_r(d, calc, lab("w", S.ROOT))
    if r == "cv":
        return cv(d, calc, lab("w", S.ROOT), a["var"])
    if r == "nd":
        return nd(d, calc, lab("w"), lab("u"), a["vars"])
    if r == "dd":
        return dd(d, calc, lab("w"), lab("u"), a["vars"])
    if r == "cd":
        return cd(d, calc, lab("w", S.ROOT), a["vars"])
    if r == "ps":
        return ps(d, calc, a["x"], a["y"])
    if r == "ls":
        return ls(d, calc, lab("u"), lab("to"))
    if r == "n":
        return n(d, calc, lab("u"))
    if r == "mrg":
        return mrg(d, calc, lab("u"))
    if r in ("ctr_in", "ctr_out"):
        pf = _one_form(req)
        want = IN if r == "ctr_in" else OUT
        if pf.pol is not want:
            raise TransformError(f"{r} needs an {'input' if want is IN else 'output'} formula")
        return (ctr_in if r == "ctr_in" else ctr_out)(d, calc, lab("w", S.ROOT), pf)
    if r == "lft":
        return lft(d, calc, lab("w"), lab("u"), _forms(req))
    if r == "lwr":
        return lwr(d, calc, lab("w"), lab("u"), _forms(req))
    if r == "ec":
        return ec(d, calc, lab("u"), lab("v"))
    if r == "ex":
        return ex(d, calc, lab("v"), lab("u"))
    if r == "fresh_delete":
        return fresh_delete(d, a["var"], calc, lab("label", S.ROOT))
    if r == "cut":
        return cut(d, calc)
    raise TransformError(f"unknown transform {r!r}")


def admissible(req: TransformRequest, calc: Calculus, budget=None, strategy: str = "auto") -> Derivation:
    """Apply the admissible rule named in req; see ``apply_request`` for provenance."""
    return apply_request(req, calc, budget, strategy).derivation


def apply_request(req: TransformRequest, calc: Calculus, budget=None, strategy: str = "auto") -> TransformResult:
    """strategy: "auto" (permute, then re-prove in the GD family), "permute" or "reprove"."""
    if req.rule == "invert" or req.rule.startswith("invert("):
        raise TransformError("use invert() for inversions; it returns several derivations")
    if req.rule not in SCOPE:
        raise TransformError(f"unknown transform {req.rule!r}")
    if strategy not in ("auto", "permute", "reprove"):
        raise ValueError(f"unknown strategy {strategy!r}")
    fallback_ok = calc.gd_family and req.rule in GD_REPROVE
    if strategy == "reprove":
        if not fallback_ok:
            raise TransformError(f"{req.rule} is height-preserving in {calc.logic}; no re-proving needed")
        target = _target(req, calc)
        return TransformResult(reprove(target, calc, budget), True)
    try:
        return TransformResult(_dispatch(req, calc), False)
    except TransformError:
        if strategy == "auto" and fallback_ok:
            return TransformResult(reprove(_target(req, calc), calc, budget), True)
        raise


def _target(req: TransformRequest, calc: Calculus) -> Node:
    """The conclusion the rule would produce, computed without touching the proof."""
    a, s = req.args, req.derivation.conclusion

    def lab(k):
        return _label(a[k])

    try:
        if req.rule == "ex":
            u = lab("u") if "u" in a else max(s.labels()) + 1
            return Ex(lab("v"), u).seq(s)
        if req.rule == "ec":
            return Ec(lab("u"), lab("v")).seq(s)
        if req.rule == "lwr":
            return Lwr(lab("w"), lab("u"), _forms(req)).seq(s)
        if req.rule == "ctr_out":
            w = lab("w") if "w" in a else S.ROOT
            return Ctr(w, _one_form(req)).seq(s)
    except (KeyError, ValueError) as e:
        raise TransformError(f"{req.rule}: {e}") from None
    raise TransformError(f"no re-proving target for {req.rule}")


def verified(d: Derivation, calc: Calculus) -> Derivation:
    """d itself, after checking it; raises TransformError otherwise."""
    bad = check(d, calc)
    if bad:
        raise TransformError("; ".join(map(str, bad[:3])))
    return d


__all__ += ["Ctx", "Invert", "relocate", "verified", "cut"]
