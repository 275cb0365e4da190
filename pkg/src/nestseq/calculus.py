"""Rule schemas of the nested calculi and their structural extensions.

Every rule is read bottom-up: given a conclusion and a small set of
parameters (``Params``), ``build`` computes the premises or raises
``RuleError`` when a side condition fails.  The checker and the prover both
go through ``build``, so they cannot disagree on what a rule does.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import formula as F
from . import sequent as S
from .formula import Formula
from .sequent import IN, OUT, PF, Fresh, Node

# rule identifiers
ID, ID_Q, BOT_L = "id", "id_q", "bot_l"
OR_L, OR_R, AND_L, AND_R, IMP_L, IMP_R = "or_l", "or_r", "and_l", "and_r", "imp_l", "imp_r"
LIN, DS = "lin", "ds"
EX_L, EX_R1, EX_R2, ALL_R, ALL_L1, ALL_L2 = "ex_l", "ex_r1", "ex_r2", "all_r", "all_l1", "all_l2"
CUT = "cut"

INITIAL = {ID, ID_Q, BOT_L}
PROPOSITIONAL = {ID, BOT_L, OR_L, OR_R, AND_L, AND_R, IMP_L, IMP_R}
QUANTIFIER = {ID_Q, DS, EX_L, EX_R1, EX_R2, ALL_R, ALL_L1, ALL_L2}
LOGICAL = {OR_L, OR_R, AND_L, AND_R, IMP_L, IMP_R, DS, EX_L, EX_R1, EX_R2, ALL_R, ALL_L1, ALL_L2}
# rules whose principal formula survives into the premises
KEEPS_PRINCIPAL = {IMP_L, DS, EX_R1, EX_R2, ALL_L1, ALL_L2}

LOGICS = ("I", "GD", "ND", "CD", "GN", "GC")
GD_FAMILY = {"GD", "GN", "GC"}


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    """Rule parameters.

    ``w`` is the label of the principal formula (the parent for lin and
    cut's site), ``u`` a target or fresh child label, ``v`` the label whose
    signature receives a fresh variable (ex_r2, all_l2) or the second child
    of lin, ``var`` the instantiating or fresh variable, ``labels`` the
    chain/fan of an extension rule.
    """

    w: int | None = None
    formula: Formula | None = None
    u: int | None = None
    v: int | None = None
    var: str | None = None
    labels: tuple[int, ...] = ()

    def to_json(self) -> dict:
        d = {}
        for k in ("w", "u", "v"):
            if getattr(self, k) is not None:
                d[k] = S.label_name(getattr(self, k))
        if self.formula is not None:
            d["formula"] = F.show(self.formula)
        if self.var is not None:
            d["var"] = self.var
        if self.labels:
            d["labels"] = [S.label_name(x) for x in self.labels]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Params":
        kw = {}
        for k in ("w", "u", "v"):
            if k in d:
                kw[k] = S.parse_label(d[k])
        if "formula" in d:
            kw["formula"] = F.parse(d["formula"])
        if "var" in d:
            kw["var"] = d["var"]
        if "labels" in d:
            kw["labels"] = tuple(S.parse_label(x) for x in d["labels"])
        return cls(**kw)

    def principal(self, rule: str) -> PF | None:
        if self.formula is None or rule in (CUT, ID, ID_Q):
            return None
        pol = IN if rule in (OR_L, AND_L, IMP_L, DS, EX_L, ALL_L1, ALL_L2) else OUT
        return PF(self.formula, pol)


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    conclusion: Node
    premises: tuple[Node, ...]
    params: Params

    @property
    def principal(self) -> tuple[int, PF] | None:
        pf = self.params.principal(self.rule)
        return None if pf is None else (self.params.w, pf)

    def fresh_label(self) -> int | None:
        return self.params.u if self.rule in (IMP_R, ALL_R) else None

    def fresh_var(self) -> str | None:
        return self.params.var if self.rule in (EX_L, EX_R2, ALL_R, ALL_L2) else None


# --------------------------------------------------------------- extensions

_DISJ = re.compile(r"\s*w(\d*)\s*(<=|=)\s*w(\d*)\s*")


@dataclass(frozen=True)
class Extension:
    """A structural rule compiled from a frame condition.

    ``kind`` is ``"dlc"`` (chain w1 ... wn, disjuncts w_{i+1} <= w_i) or
    ``"dbc"`` (a world w with children w1 ... wn; disjuncts w_j <= w,
    w_j <= w_k or w_j = w_k).  A disjunct is stored as (op, j, k) with
    index 0 standing for the fan root.
    """

    name: str
    kind: str
    n: int
    disjuncts: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        if self.kind not in ("dlc", "dbc"):
            raise ValueError(f"unknown extension kind {self.kind!r}")
        if self.n < 1 or not self.disjuncts:
            raise ValueError("extension needs n >= 1 and at least one disjunct")
        for op, j, k in self.disjuncts:
            if self.kind == "dlc":
                if op != "<=" or k < 1 or j != k + 1 or j > self.n:
                    raise ValueError(f"dlc disjunct must read w{{i+1}} <= w{{i}}, got w{j}{op}w{k}")
            else:
                if not (1 <= j <= self.n and 0 <= k <= self.n and j != k):
                    raise ValueError(f"bad dbc disjunct w{j}{op}w{k}")
                if op == "=" and k == 0:
                    raise ValueError("dbc equalities relate two children")

    @classmethod
    def from_dict(cls, d: dict) -> "Extension":
        ds = []
        for item in d["disjuncts"]:
            m = _DISJ.fullmatch(item)
            if not m:
                raise ValueError(f"cannot read disjunct {item!r}")
            j = int(m.group(1) or 0)
            k = int(m.group(3) or 0)
            ds.append((m.group(2), j, k))
        return cls(d["name"], d["kind"].lower(), int(d["n"]), tuple(ds))

    def to_dict(self) -> dict:
        def w(i):
            return "w" if i == 0 else f"w{i}"

        return {
            "name": self.name,
            "kind": self.kind,
            "n": self.n,
            "disjuncts": [f"{w(j)}{op}{w(k)}" for op, j, k in self.disjuncts],
        }

    # premises for a given chain / fan of labels
    def premises(self, s: Node, labels: tuple[int, ...]) -> tuple[Node, ...]:
        par = S.parents(s)
        if self.kind == "dlc":
            if len(labels) != self.n:
                raise RuleError(f"{self.name}: needs a chain of {self.n} labels")
            for a, b in zip(labels, labels[1:]):
                if par.get(b) != a:
                    raise RuleError(f"{self.name}: {S.label_name(b)} is not a child of {S.label_name(a)}")
            if not s.has(labels[0]):
                raise RuleError(f"{self.name}: no label {S.label_name(labels[0])}")
            return tuple(S.merge_into_parent(s, labels[j - 1]) for _, j, _ in self.disjuncts)
        if len(labels) != self.n + 1 or len(set(labels)) != len(labels):
            raise RuleError(f"{self.name}: needs a root and {self.n} distinct children")
        root, kids = labels[0], labels[1:]
        for c in kids:
            if par.get(c) != root:
                raise RuleError(f"{self.name}: {S.label_name(c)} is not a child of {S.label_name(root)}")
        out = []
        for op, j, k in self.disjuncts:
            a = kids[j - 1]
            if op == "<=" and k == 0:
                out.append(S.merge_into_parent(s, a))
            elif op == "<=":
                rest, sub = S.detach(s, kids[k - 1])
                out.append(S.attach(rest, a, sub))
            else:
                out.append(S.merge_siblings(s, a, kids[k - 1]))
        return tuple(out)

    def candidates(self, s: Node) -> list[tuple[int, ...]]:
        out = []
        if self.kind == "dlc":
            def chains(n: Node, k: int):
                if k == 1:
                    yield (n.label,)
                    return
                for c in n.children:
                    for rest in chains(c, k - 1):
                        yield (n.label,) + rest

            for n in s.nodes():
                out.extend(chains(n, self.n))
        else:
            for n in s.nodes():
                for kids in itertools.permutations([c.label for c in n.children], self.n):
                    out.append((n.label,) + kids)
        return out


BD2 = Extension("bd2", "dlc", 3, (("<=", 2, 1), ("<=", 3, 2)))
SYM = Extension("sym", "dbc", 1, (("<=", 1, 0),))
LIN_AS_DBC = Extension("lin_dbc", "dbc", 2, (("<=", 1, 2), ("<=", 2, 1)))
BUILTIN_EXTENSIONS = {"bd2": BD2, "sym": SYM}


def load_extension(path: str | Path) -> list[Extension]:
    """Read one or more extension specs from a JSON or TOML file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        data = tomllib.loads(text)
    else:
        data = json.loads(text)
    items = data.get("extension", data.get("extensions", data)) if isinstance(data, dict) else data
    if isinstance(items, dict):
        items = [items]
    return [Extension.from_dict(d) for d in items]


def resolve_extension(name: str) -> list[Extension]:
    if name in BUILTIN_EXTENSIONS:
        return [BUILTIN_EXTENSIONS[name]]
    if Path(name).exists():
        return load_extension(name)
    raise ValueError(f"unknown extension {name!r}")


# ---------------------------------------------------------------- calculi


@dataclass(frozen=True)
class Calculus:
    logic: str
    regime: str  # "prop", "ND" or "CD"
    rules: frozenset[str]
    extensions: tuple[Extension, ...] = ()
    allow_cut: bool = False

    @property
    def name(self) -> str:
        return "+".join([self.logic] + [e.name for e in self.extensions])

    @property
    def first_order(self) -> bool:
        return self.regime != "prop"

    @property
    def gd_family(self) -> bool:
        return LIN in self.rules

    @property
    def extended(self) -> bool:
        return bool(self.extensions)

    def extension(self, name: str) -> Extension | None:
        for e in self.extensions:
            if e.name == name:
                return e
        return None

    def allows(self, rule: str) -> bool:
        if rule == CUT:
            return self.allow_cut
        return rule in self.rules or self.extension(rule) is not None

    def with_cut(self) -> "Calculus":
        return replace(self, allow_cut=True)

    def with_extensions(self, exts) -> "Calculus":
        return replace(self, extensions=self.extensions + tuple(exts))


def calculus(logic: str, extensions=()) -> Calculus:
    logic = logic.upper()
    if logic not in LOGICS:
        raise ValueError(f"unknown logic {logic!r}")
    rules = set(PROPOSITIONAL)
    regime = "prop"
    if logic in ("ND", "CD", "GN", "GC"):
        rules |= QUANTIFIER
        regime = "CD" if logic in ("CD", "GC") else "ND"
    if logic in GD_FAMILY:
        rules.add(LIN)
    exts = []
    for e in extensions:
        exts.extend(resolve_extension(e) if isinstance(e, str) else [e])
    return Calculus(logic, regime, frozenset(rules), tuple(exts))


# ------------------------------------------------------------ rule schemas


def _site(s: Node, w: int, pf: PF) -> Node:
    try:
        n = s.find(w)
    except KeyError:
        raise RuleError(f"no label {S.label_name(w)}") from None
    if n.count(pf) == 0:
        raise RuleError(f"{pf} does not occur at {S.label_name(w)}")
    return n


def _shape(f: Formula, cls, rule: str):
    if not isinstance(f, cls):
        raise RuleError(f"{rule}: principal {F.show(f)} has the wrong shape")


def _swap(s: Node, w: int, pf: PF, *new: PF, sig=(), kids=()) -> Node:
    return S.update_at(s, w, lambda n: n.remove(pf).add(*new, sig=sig, kids=kids))


def _add(s: Node, w: int, *new: PF, sig=()) -> Node:
    return S.update_at(s, w, lambda n: n.add(*new, sig=sig))


def _need_label(s: Node, *ws):
    for w in ws:
        if w is None or not s.has(w):
            raise RuleError(f"no label {w if w is None else S.label_name(w)}")


def _fresh_var(s: Node, y: str | None):
    if not y:
        raise RuleError("missing variable")
    if y in s.vars():
        raise RuleError(f"variable {y} is not fresh")


def _fresh_label(s: Node, u: int | None):
    if u is None or u in s.labels() or u == S.ROOT:
        raise RuleError(f"label {u if u is None else S.label_name(u)} is not fresh")


def build(rule: str, s: Node, p: Params, calc: Calculus) -> RuleInstance:
    """Instantiate ``rule`` with conclusion ``s``; raises RuleError on failure."""
    if not calc.allows(rule):
        raise RuleError(f"rule {rule} is not part of {calc.name}")
    return RuleInstance(rule, s, _premises(rule, s, p, calc), p)


def _premises(rule: str, s: Node, p: Params, calc: Calculus) -> tuple[Node, ...]:
    f, w = p.formula, p.w
    nd = calc.regime == "ND"

    ext = calc.extension(rule)
    if ext is not None:
        return ext.premises(s, p.labels)

    if rule in (ID, ID_Q):
        if not isinstance(f, F.Atom):
            raise RuleError(f"{rule}: {f} is not atomic")
        if rule == ID and f.args:
            raise RuleError("id: atom must be propositional")
        _site(s, w, PF(f, IN))
        _site(s, p.u, PF(f, OUT))
        if not S.reachable(s, w, p.u):
            raise RuleError(f"{rule}: {S.label_name(p.u)} is not reachable from {S.label_name(w)}")
        return ()
    if rule == BOT_L:
        _site(s, w, PF(F.BOT, IN))
        return ()

    if rule == CUT:
        _need_label(s, w)
        return (_add(s, w, PF(f, OUT)), _add(s, w, PF(f, IN)))

    if rule == LIN:
        u, v = p.u, p.v
        par = S.parents(s)
        if u == v or par.get(u) != w or par.get(v) != w or w is None:
            raise RuleError("lin: needs two distinct children of the same node")
        rest, sv = S.detach(s, v)
        first = S.attach(rest, u, sv)
        rest, su = S.detach(s, u)
        second = S.attach(rest, v, su)
        return (first, second)

    pf = p.principal(rule)
    if pf is None:
        raise RuleError(f"{rule}: missing principal formula")
    _site(s, w, pf)

    if rule == OR_L:
        _shape(f, F.Or, rule)
        return (_swap(s, w, pf, PF(f.left, IN)), _swap(s, w, pf, PF(f.right, IN)))
    if rule == OR_R:
        _shape(f, F.Or, rule)
        return (_swap(s, w, pf, PF(f.left, OUT), PF(f.right, OUT)),)
    if rule == AND_L:
        _shape(f, F.And, rule)
        return (_swap(s, w, pf, PF(f.left, IN), PF(f.right, IN)),)
    if rule == AND_R:
        _shape(f, F.And, rule)
        return (_swap(s, w, pf, PF(f.left, OUT)), _swap(s, w, pf, PF(f.right, OUT)))
    if rule == IMP_R:
        _shape(f, F.Imp, rule)
        _fresh_label(s, p.u)
        kid = Node(p.u, (), (PF(f.left, IN), PF(f.right, OUT)))
        return (_swap(s, w, pf, kids=[kid]),)
    if rule == IMP_L:
        _shape(f, F.Imp, rule)
        _need_label(s, p.u)
        if not S.reachable(s, w, p.u):
            raise RuleError(f"imp_l: {S.label_name(p.u)} not reachable from {S.label_name(w)}")
        return (_add(s, p.u, PF(f.left, OUT)), _add(s, p.u, PF(f.right, IN)))
    if rule == DS:
        _shape(f, F.Atom, rule)
        return (_add(s, w, sig=f.args),)
    if rule == EX_L:
        _shape(f, F.Exists, rule)
        _fresh_var(s, p.var)
        return (_swap(s, w, pf, PF(F.substitute(f.body, p.var, f.var), IN), sig=[p.var]),)
    if rule == EX_R1:
        _shape(f, F.Exists, rule)
        if not p.var:
            raise RuleError("ex_r1: missing variable")
        if nd and not S.available(s, p.var, w):
            raise RuleError(f"ex_r1: {p.var} is not available at {S.label_name(w)}")
        return (_add(s, w, PF(F.substitute(f.body, p.var, f.var), OUT)),)
    if rule == EX_R2:
        _shape(f, F.Exists, rule)
        _need_label(s, p.v)
        _fresh_var(s, p.var)
        if nd and not S.reachable(s, p.v, w):
            raise RuleError(f"ex_r2: {S.label_name(w)} not reachable from {S.label_name(p.v)}")
        s2 = _add(s, p.v, sig=[p.var])
        return (_add(s2, w, PF(F.substitute(f.body, p.var, f.var), OUT)),)
    if rule == ALL_R:
        _shape(f, F.Forall, rule)
        _fresh_label(s, p.u)
        _fresh_var(s, p.var)
        kid = Node(p.u, (p.var,), (PF(F.substitute(f.body, p.var, f.var), OUT),))
        return (_swap(s, w, pf, kids=[kid]),)
    if rule == ALL_L1:
        _shape(f, F.Forall, rule)
        _need_label(s, p.u)
        if not p.var:
            raise RuleError("all_l1: missing variable")
        if not S.reachable(s, w, p.u):
            raise RuleError(f"all_l1: {S.label_name(p.u)} not reachable from {S.label_name(w)}")
        if nd and not S.available(s, p.var, p.u):
            raise RuleError(f"all_l1: {p.var} is not available at {S.label_name(p.u)}")
        return (_add(s, p.u, PF(F.substitute(f.body, p.var, f.var), IN)),)
    if rule == ALL_L2:
        _shape(f, F.Forall, rule)
        _need_label(s, p.u, p.v)
        _fresh_var(s, p.var)
        if not S.reachable(s, w, p.u):
            raise RuleError(f"all_l2: {S.label_name(p.u)} not reachable from {S.label_name(w)}")
        if nd and not S.reachable(s, p.v, w):
            raise RuleError(f"all_l2: {S.label_name(w)} not reachable from {S.label_name(p.v)}")
        s2 = _add(s, p.v, sig=[p.var])
        return (_add(s2, p.u, PF(F.substitute(f.body, p.var, f.var), IN)),)
    raise RuleError(f"unknown rule {rule!r}")


# ------------------------------------------------------ instance enumeration


def _distinct(forms, pol, cls):
    seen = set()
    for pf in forms:
        if pf.pol is pol and isinstance(pf.formula, cls) and pf.key not in seen:
            seen.add(pf.key)
            yield pf.formula


def candidate_vars(s: Node, w: int, calc: Calculus, extra=()) -> list[str]:
    """Variables an instantiating rule may use at w under the calculus' regime."""
    if calc.regime == "ND":
        return S.available_vars(s, w)
    out = []
    for n in s.nodes():
        for x in n.sig:
            if x not in out:
                out.append(x)
    for x in extra:
        if x not in out:
            out.append(x)
    return out


def applicable_instances(s: Node, rule: str, calc: Calculus, fresh: Fresh | None = None, extra_vars=()) -> list[RuleInstance]:
    """All instances of ``rule`` with conclusion s, in a deterministic order.

    Fresh labels and variables are drawn from ``fresh`` (a supply seeded
    above the sequent by default); ex_r2 and all_l2 are enumerated with the
    fresh variable attached at every admissible label.
    """
    if not calc.allows(rule):
        return []
    fresh = fresh or Fresh.above(s)
    out: list[RuleInstance] = []

    def add(p: Params):
        try:
            out.append(build(rule, s, p, calc))
        except RuleError:
            pass

    ext = calc.extension(rule)
    if ext is not None:
        for labels in ext.candidates(s):
            add(Params(labels=labels))
        return out
    if rule == LIN:
        for n in s.nodes():
            kids = [c.label for c in n.children]
            for a, b in itertools.combinations(kids, 2):
                add(Params(w=n.label, u=a, v=b))
        return out

    for n in s.nodes():
        w = n.label
        if rule in (ID, ID_Q):
            for a in _distinct(n.forms, IN, F.Atom):
                for m in S.descendants_or_self(s, w):
                    if s.find(m).count(PF(a, OUT)):
                        add(Params(w=w, formula=a, u=m))
        elif rule == BOT_L:
            if n.count(PF(F.BOT, IN)):
                add(Params(w=w))
        elif rule in (OR_L, AND_L):
            for f in _distinct(n.forms, IN, F.Or if rule == OR_L else F.And):
                add(Params(w=w, formula=f))
        elif rule in (OR_R, AND_R):
            for f in _distinct(n.forms, OUT, F.Or if rule == OR_R else F.And):
                add(Params(w=w, formula=f))
        elif rule == IMP_R:
            for f in _distinct(n.forms, OUT, F.Imp):
                add(Params(w=w, formula=f, u=fresh.label()))
        elif rule == IMP_L:
            for f in _distinct(n.forms, IN, F.Imp):
                for u in S.descendants_or_self(s, w):
                    add(Params(w=w, formula=f, u=u))
        elif rule == DS:
            for a in _distinct(n.forms, IN, F.Atom):
                if a.args and not set(a.args) <= set(n.sig):
                    add(Params(w=w, formula=a))
        elif rule == EX_L:
            for f in _distinct(n.forms, IN, F.Exists):
                add(Params(w=w, formula=f, var=fresh.var(f.var)))
        elif rule == EX_R1:
            for f in _distinct(n.forms, OUT, F.Exists):
                for y in candidate_vars(s, w, calc, extra_vars):
                    add(Params(w=w, formula=f, var=y))
        elif rule == EX_R2:
            for f in _distinct(n.forms, OUT, F.Exists):
                y = fresh.var(f.var)
                for v in s.labels():
                    add(Params(w=w, formula=f, v=v, var=y))
        elif rule == ALL_R:
            for f in _distinct(n.forms, OUT, F.Forall):
                add(Params(w=w, formula=f, u=fresh.label(), var=fresh.var(f.var)))
        elif rule == ALL_L1:
            for f in _distinct(n.forms, IN, F.Forall):
                for u in S.descendants_or_self(s, w):
                    for y in candidate_vars(s, u, calc, extra_vars):
                        add(Params(w=w, formula=f, u=u, var=y))
        elif rule == ALL_L2:
            for f in _distinct(n.forms, IN, F.Forall):
                y = fresh.var(f.var)
                for u in S.descendants_or_self(s, w):
                    for v in s.labels():
                        add(Params(w=w, formula=f, u=u, v=v, var=y))
    return out


def is_axiomatic(s: Node, calc: Calculus) -> RuleInstance | None:
    """An initial-rule instance closing s, if any (bot_l first, then identity)."""
    bot = PF(F.BOT, IN)
    for n in s.nodes():
        if bot in n.forms:
            return build(BOT_L, s, Params(w=n.label), calc)
    rule = ID_Q if calc.first_order else ID

    # inputs are visible from every descendant, so carry them down the tree
    def go(n: Node, seen: dict):
        here = dict(seen)
        for pf in n.forms:
            if pf.pol is IN and isinstance(pf.formula, F.Atom) and pf.key[0] not in here:
                here[pf.key[0]] = (n.label, pf.formula)
        for pf in n.forms:
            if pf.pol is OUT and isinstance(pf.formula, F.Atom) and pf.key[0] in here:
                w, a = here[pf.key[0]]
                return build(rule, s, Params(w=w, formula=a, u=n.label), calc)
        for c in n.children:
            r = go(c, here)
            if r is not None:
                return r
        return None

    return go(s, {})
