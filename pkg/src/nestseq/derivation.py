"""Derivation trees and an independent checker."""

from __future__ import annotations

from dataclasses import dataclass

from . import calculus as C
from . import formula as F
from . import sequent as S
from .calculus import Calculus, Params, RuleError, RuleInstance
from .formula import Formula
from .sequent import IN, OUT, PF, Fresh, Node


@dataclass(frozen=True)
class Derivation:
    inst: RuleInstance
    children: tuple["Derivation", ...] = ()

    @property
    def rule(self) -> str:
        return self.inst.rule

    @property
    def conclusion(self) -> Node:
        return self.inst.conclusion

    @property
    def params(self) -> Params:
        return self.inst.params

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()

    def rules_used(self) -> set[str]:
        return {d.rule for d in self.nodes()}

    def count(self, rule: str) -> int:
        return sum(1 for d in self.nodes() if d.rule == rule)

    def __len__(self):
        return sum(1 for _ in self.nodes())


@dataclass(frozen=True)
class Violation:
    path: tuple[int, ...]
    message: str

    def __str__(self):
        where = "/".join(map(str, self.path)) or "root"
        return f"{where}: {self.message}"


def height(d: Derivation) -> int:
    if not d.children:
        return 1
    return 1 + max(height(c) for c in d.children)


def make(rule: str, s: Node, calc: Calculus, children=(), **params) -> Derivation:
    """Build one inference, checking it against the stored children."""
    inst = C.build(rule, s, Params(**params), calc)
    kids = tuple(children)
    if len(kids) != len(inst.premises):
        raise RuleError(f"{rule}: expected {len(inst.premises)} premises, got {len(kids)}")
    for prem, k in zip(inst.premises, kids):
        if k.conclusion != prem:
            raise RuleError(f"{rule}: premise mismatch\n  want {prem}\n  got  {k.conclusion}")
    return Derivation(inst, kids)


def check(d: Derivation, calc: Calculus) -> list[Violation]:
    """Empty list iff d is a derivation in calc.  Never raises."""
    out: list[Violation] = []
    stack = [(d, ())]
    while stack:
        node, path = stack.pop()
        try:
            inst = node.inst
            fresh = C.build(inst.rule, inst.conclusion, inst.params, calc)
            if len(node.children) != len(fresh.premises):
                out.append(Violation(path, f"{inst.rule}: {len(node.children)} subderivations for {len(fresh.premises)} premises"))
            else:
                for i, (prem, kid) in enumerate(zip(fresh.premises, node.children)):
                    if kid.conclusion != prem:
                        out.append(Violation(path, f"{inst.rule}: premise {i} is {kid.conclusion}, expected {prem}"))
            if not node.children and inst.rule not in C.INITIAL:
                out.append(Violation(path, f"leaf uses non-initial rule {inst.rule}"))
        except RuleError as e:
            out.append(Violation(path, str(e)))
        except Exception as e:  # malformed input must not escape
            out.append(Violation(path, f"malformed inference: {type(e).__name__}: {e}"))
        for i, kid in enumerate(node.children):
            stack.append((kid, path + (i,)))
    out.sort(key=lambda v: v.path)
    return out


def is_valid(d: Derivation, calc: Calculus) -> bool:
    return not check(d, calc)


# ------------------------------------------------------------------ serial


def to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule,
        "conclusion": S.to_json(d.conclusion),
        "inst": d.params.to_json(),
        "premises": [to_json(c) for c in d.children],
    }


def from_json(data: dict) -> Derivation:
    """Rebuild a derivation; premises are taken from the stored subderivations."""
    kids = tuple(from_json(k) for k in data.get("premises", []))
    concl = S.from_json(data["conclusion"])
    params = Params.from_json(data.get("inst", {}))
    inst = RuleInstance(data["rule"], concl, tuple(k.conclusion for k in kids), params)
    return Derivation(inst, kids)


def render(d: Derivation, indent: str = "  ") -> str:
    """One inference per line, indented by depth, conclusion first."""
    lines = []

    def go(node: Derivation, depth: int):
        p = node.params.to_json()
        extra = " ".join(f"{k}={v}" for k, v in p.items())
        lines.append(f"{indent * depth}{node.rule}{' ' + extra if extra else ''} :: {node.conclusion}")
        for c in node.children:
            go(c, depth + 1)

    go(d, 0)
    return "\n".join(lines)


# ---------------------------------------------------------- general identity


def derive_general_id(s: Node, phi: Formula, w: int, u: int, calc: Calculus | None = None, fresh: Fresh | None = None) -> Derivation:
    """A derivation of s{phi^i}_w{phi^o}_u, for w ->> u in s.

    Follows the usual induction on phi.  For first-order calculi atoms close
    with id_q, otherwise with id.
    """
    calc = calc or (C.calculus("ND") if not F.is_propositional(phi) else C.calculus("I"))
    if not S.reachable(s, w, u):
        raise ValueError(f"{S.label_name(u)} is not reachable from {S.label_name(w)}")
    fresh = fresh or Fresh.above(s, phi)
    start = S.update_at(S.update_at(s, w, lambda n: n.add(PF(phi, IN))), u, lambda n: n.add(PF(phi, OUT)))
    return _gid(start, phi, w, u, calc, fresh)


def _gid(s: Node, phi: Formula, w: int, u: int, calc: Calculus, fresh: Fresh) -> Derivation:
    """s already contains phi^i at w and phi^o at u."""
    if isinstance(phi, F.Atom):
        rule = C.ID_Q if calc.first_order else C.ID
        return make(rule, s, calc, w=w, formula=phi, u=u)
    if isinstance(phi, F.Bottom):
        return make(C.BOT_L, s, calc, w=w)
    if isinstance(phi, F.Or):
        a, b = phi.left, phi.right
        s1 = C.build(C.OR_R, s, Params(w=u, formula=phi), calc).premises[0]
        p1, p2 = C.build(C.OR_L, s1, Params(w=w, formula=phi), calc).premises
        left = _gid(p1, a, w, u, calc, fresh)
        right = _gid(p2, b, w, u, calc, fresh)
        or_l = make(C.OR_L, s1, calc, (left, right), w=w, formula=phi)
        return make(C.OR_R, s, calc, (or_l,), w=u, formula=phi)
    if isinstance(phi, F.And):
        a, b = phi.left, phi.right
        s1 = C.build(C.AND_L, s, Params(w=w, formula=phi), calc).premises[0]
        p1, p2 = C.build(C.AND_R, s1, Params(w=u, formula=phi), calc).premises
        and_r = make(C.AND_R, s1, calc, (_gid(p1, a, w, u, calc, fresh), _gid(p2, b, w, u, calc, fresh)), w=u, formula=phi)
        return make(C.AND_L, s, calc, (and_r,), w=w, formula=phi)
    if isinstance(phi, F.Imp):
        a, b = phi.left, phi.right
        v = fresh.label()
        s1 = C.build(C.IMP_R, s, Params(w=u, formula=phi, u=v), calc).premises[0]
        p1, p2 = C.build(C.IMP_L, s1, Params(w=w, formula=phi, u=v), calc).premises
        # p1: a^i, b^o, a^o at v ; p2: a^i, b^o, b^i at v
        imp_l = make(C.IMP_L, s1, calc, (_gid(p1, a, v, v, calc, fresh), _gid(p2, b, v, v, calc, fresh)), w=w, formula=phi, u=v)
        return make(C.IMP_R, s, calc, (imp_l,), w=u, formula=phi, u=v)
    if isinstance(phi, F.Forall):
        v, y = fresh.label(), fresh.var(phi.var)
        body = F.substitute(phi.body, y, phi.var)
        s1 = C.build(C.ALL_R, s, Params(w=u, formula=phi, u=v, var=y), calc).premises[0]
        s2 = C.build(C.ALL_L1, s1, Params(w=w, formula=phi, u=v, var=y), calc).premises[0]
        top = _gid(s2, body, v, v, calc, fresh)
        mid = make(C.ALL_L1, s1, calc, (top,), w=w, formula=phi, u=v, var=y)
        return make(C.ALL_R, s, calc, (mid,), w=u, formula=phi, u=v, var=y)
    if isinstance(phi, F.Exists):
        y = fresh.var(phi.var)
        body = F.substitute(phi.body, y, phi.var)
        s1 = C.build(C.EX_L, s, Params(w=w, formula=phi, var=y), calc).premises[0]
        s2 = C.build(C.EX_R1, s1, Params(w=u, formula=phi, var=y), calc).premises[0]
        top = _gid(s2, body, w, u, calc, fresh)
        mid = make(C.EX_R1, s1, calc, (top,), w=u, formula=phi, var=y)
        return make(C.EX_L, s, calc, (mid,), w=w, formula=phi, var=y)
    raise TypeError(phi)
