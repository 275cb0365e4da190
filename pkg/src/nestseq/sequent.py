"""Nested sequents: labelled trees of signatures and polarized formulas.

A node carries an integer label (rendered ``w<k>``, the root is ``w0``), a
multiset of variables and a multiset of input/output formulas.  Multisets are
kept as sorted tuples so that structural equality is plain tuple equality;
formulas are compared up to renaming of bound variables.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from . import formula as F
from .formula import Formula, ParseError, TokenStream

ROOT = 0


class Pol(str, Enum):
    IN = "i"
    OUT = "o"

    def __repr__(self):
        return self.value


IN, OUT = Pol.IN, Pol.OUT


@dataclass(frozen=True)
class PF:
    """A polarized formula."""

    formula: Formula
    pol: Pol
    key: tuple[str, str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = (F.alpha_key(self.formula), self.pol.value)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __eq__(self, other):
        return isinstance(other, PF) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"{F.show(self.formula)}^{self.pol.value}"


def inp(f) -> PF:
    return PF(F.parse(f) if isinstance(f, str) else f, IN)


def out(f) -> PF:
    return PF(F.parse(f) if isinstance(f, str) else f, OUT)


def label_name(w: int) -> str:
    return f"w{w}"


def parse_label(s: str) -> int:
    m = re.fullmatch(r"w(\d+)", s)
    if not m:
        raise ValueError(f"bad label {s!r}")
    return int(m.group(1))


@dataclass(frozen=True, eq=False)
class Node:
    label: int = ROOT
    sig: tuple[str, ...] = ()
    forms: tuple[PF, ...] = ()
    children: tuple["Node", ...] = ()
    _key: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sig", tuple(sorted(self.sig)))
        object.__setattr__(self, "forms", tuple(sorted(self.forms, key=lambda p: p.key)))
        object.__setattr__(self, "children", tuple(sorted(self.children, key=lambda n: n.label)))
        key = (
            self.label,
            self.sig,
            tuple(p.key for p in self.forms),
            tuple(c.key for c in self.children),
        )
        object.__setattr__(self, "_key", key)

    @property
    def key(self) -> tuple:
        return self._key

    def __eq__(self, other):
        return isinstance(other, Node) and self._key == other._key

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self._key)
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        return render(self)

    # ------------------------------------------------------------ queries

    @property
    def inputs(self) -> list[Formula]:
        return [p.formula for p in self.forms if p.pol is IN]

    @property
    def outputs(self) -> list[Formula]:
        return [p.formula for p in self.forms if p.pol is OUT]

    def nodes(self) -> Iterator["Node"]:
        yield self
        for c in self.children:
            yield from c.nodes()

    def labels(self) -> list[int]:
        return [n.label for n in self.nodes()]

    def find(self, w: int) -> "Node":
        for n in self.nodes():
            if n.label == w:
                return n
        raise KeyError(label_name(w))

    def path(self, w: int) -> list["Node"]:
        """Nodes from the root down to w, inclusive."""
        if self.label == w:
            return [self]
        for c in self.children:
            p = c.path(w)
            if p:
                return [self] + p
        return []

    def has(self, w: int) -> bool:
        return bool(self.path(w))

    def count(self, pf: PF) -> int:
        k = pf.key
        return sum(1 for p in self.forms if p.key == k)

    def size(self) -> int:
        return sum(1 + len(n.forms) + len(n.sig) for n in self.nodes())

    def sig_vars(self) -> set[str]:
        return {x for n in self.nodes() for x in n.sig}

    def free_vars(self) -> set[str]:
        return {x for n in self.nodes() for p in n.forms for x in F.free_vars(p.formula)}

    def vars(self) -> set[str]:
        """Every variable occurring in a signature or free in a formula."""
        return self.sig_vars() | self.free_vars()

    def all_var_names(self) -> set[str]:
        return self.sig_vars() | {x for n in self.nodes() for p in n.forms for x in F.all_vars(p.formula)}

    # ------------------------------------------------------------ updates

    def with_(self, **kw) -> "Node":
        d = dict(label=self.label, sig=self.sig, forms=self.forms, children=self.children)
        d.update(kw)
        return Node(**d)

    def add(self, *pfs: PF, sig: Iterable[str] = (), kids: Iterable["Node"] = ()) -> "Node":
        return Node(self.label, self.sig + tuple(sig), self.forms + pfs, self.children + tuple(kids))

    def remove(self, pf: PF) -> "Node":
        forms = list(self.forms)
        for i, p in enumerate(forms):
            if p == pf:
                del forms[i]
                return self.with_(forms=tuple(forms))
        raise KeyError(f"{pf} not at {label_name(self.label)}")

    def remove_var(self, x: str) -> "Node":
        sig = list(self.sig)
        sig.remove(x)
        return self.with_(sig=tuple(sig))

    def map_nodes(self, fn) -> "Node":
        """Bottom-up rebuild; fn receives a node whose children are already mapped."""
        kids = tuple(c.map_nodes(fn) for c in self.children)
        return fn(self.with_(children=kids))


# ------------------------------------------------------------------ zipper


@dataclass(frozen=True)
class Context:
    """A hole at some node of a sequent: the path of ancestors to it."""

    ancestors: tuple[Node, ...]
    node: Node

    def plug(self, new: Node) -> Node:
        cur = new
        old = self.node
        for anc in reversed(self.ancestors):
            kids = tuple(cur if c.label == old.label else c for c in anc.children)
            cur, old = anc.with_(children=kids), anc
        return cur


def locate(s: Node, w: int) -> Context:
    p = s.path(w)
    if not p:
        raise KeyError(label_name(w))
    return Context(tuple(p[:-1]), p[-1])


def replace_at(s: Node, w: int, new: Node) -> Node:
    return locate(s, w).plug(new)


def update_at(s: Node, w: int, fn) -> Node:
    ctx = locate(s, w)
    return ctx.plug(fn(ctx.node))


def detach(s: Node, w: int) -> tuple[Node, Node]:
    """Remove the subtree at w (not the root); returns (rest, subtree)."""
    ctx = locate(s, w)
    parent = ctx.ancestors[-1]
    rest = replace_at(s, parent.label, parent.with_(children=tuple(c for c in parent.children if c.label != w)))
    return rest, ctx.node


def attach(s: Node, w: int, sub: Node) -> Node:
    return update_at(s, w, lambda n: n.add(kids=[sub]))


def merge_into_parent(s: Node, u: int) -> Node:
    """Fuse node u with its parent: signature, formulas and children move up."""
    ctx = locate(s, u)
    if not ctx.ancestors:
        raise ValueError("cannot merge the root")
    parent = ctx.ancestors[-1]
    kids = tuple(c for c in parent.children if c.label != u)
    merged = Node(parent.label, parent.sig + ctx.node.sig, parent.forms + ctx.node.forms, kids + ctx.node.children)
    return replace_at(s, parent.label, merged)


def merge_siblings(s: Node, u: int, v: int) -> Node:
    """Fuse node v into node u; both keep their subtrees, v's label disappears."""
    s, nv = detach(s, v)
    return update_at(s, u, lambda n: Node(n.label, n.sig + nv.sig, n.forms + nv.forms, n.children + nv.children))


# ------------------------------------------------------------ reachability


def parents(s: Node) -> dict[int, int]:
    out = {}
    for n in s.nodes():
        for c in n.children:
            out[c.label] = n.label
    return out


def ancestors_or_self(s: Node, w: int) -> list[int]:
    return [n.label for n in s.path(w)]


def reachable(s: Node, w: int, u: int) -> bool:
    """w ->> u: u lies in the subtree rooted at w."""
    return w in ancestors_or_self(s, u)


def strictly_reachable(s: Node, w: int, u: int) -> bool:
    return w != u and reachable(s, w, u)


def descendants_or_self(s: Node, w: int) -> list[int]:
    return s.find(w).labels()


def reach_pairs(s: Node) -> set[tuple[int, int]]:
    out = set()
    for n in s.nodes():
        for u in n.labels():
            out.add((n.label, u))
    return out


def available(s: Node, x: str, w: int) -> bool:
    """x occurs in the signature of some ancestor-or-self of w."""
    return any(x in n.sig for n in s.path(w))


def available_vars(s: Node, w: int) -> list[str]:
    seen: list[str] = []
    for n in s.path(w):
        for x in n.sig:
            if x not in seen:
                seen.append(x)
    return seen


def is_linear(s: Node) -> bool:
    return all(len(n.children) <= 1 for n in s.nodes())


def is_flat(s: Node) -> bool:
    return not s.children


# ---------------------------------------------------------- interpretation


def interpret_propositional(s: Node) -> Formula:
    """Formula translation of a propositional nested sequent."""
    ins = F.conj(s.inputs)
    outs = F.disj(s.outputs)
    if not s.children:
        return F.Imp(ins, outs)
    kids = F.disj([interpret_propositional(c) for c in s.children])
    return F.Imp(ins, F.Or(outs, kids))


# --------------------------------------------------------------- fresh names


class Fresh:
    """Monotone supplies of labels and variables."""

    def __init__(self, next_label: int = 1, next_var: int = 1, prefix: str = "v"):
        self.next_label = next_label
        self.next_var = next_var
        self.prefix = prefix

    @classmethod
    def above(cls, *things) -> "Fresh":
        """A supply whose names do not clash with anything in the given sequents/formulas."""
        lab, var = 0, 0
        for t in things:
            if isinstance(t, Node):
                lab = max(lab, max(t.labels()))
                names = t.all_var_names()
            elif isinstance(t, str):
                names = {t}
            elif isinstance(t, int):
                lab = max(lab, t)
                names = set()
            elif isinstance(t, (set, frozenset, list, tuple)):
                names = set(t)
            else:
                names = F.all_vars(t)
            for x in names:
                m = re.search(r"__(\d+)$", x)
                if m:
                    var = max(var, int(m.group(1)))
        return cls(lab + 1, var + 1)

    def label(self) -> int:
        self.next_label += 1
        return self.next_label - 1

    def var(self, hint: str | None = None) -> str:
        base = F.base_name(hint) if hint else self.prefix
        self.next_var += 1
        return f"{base}__{self.next_var - 1}"


# --------------------------------------------------------------- rendering


def render(s: Node) -> str:
    sig = ", ".join(s.sig) if s.sig else "-"
    items = [str(p) for p in s.forms]
    items += [f"[ {render(c)} ]{label_name(c.label)}" for c in s.children]
    return f"{sig} ;" + (" " + ", ".join(items) if items else "")


def parse_sequent(text: str) -> Node:
    ts = TokenStream(text)
    node = _node(ts, ROOT)
    if ts.peek() != "<eof>":
        raise ParseError(f"unexpected {ts.peek()!r}", ts.pos)
    labels = node.labels()
    if len(labels) != len(set(labels)):
        raise ParseError("duplicate label", 0)
    return node


def _node(ts: TokenStream, label: int) -> Node:
    sig: list[str] = []
    if ts.peek() == "-":
        ts.next()
    elif ts.peek() != ";":
        sig.append(ts.ident("variable"))
        while ts.peek() == ",":
            ts.next()
            sig.append(ts.ident("variable"))
    ts.expect(";")
    forms: list[PF] = []
    kids: list[Node] = []
    if ts.peek() in ("<eof>", "]"):
        return Node(label, tuple(sig))
    while True:
        if ts.peek() == "[":
            ts.next()
            # the label follows the closing bracket, so parse the body first
            start = ts.i
            depth = 0
            while True:
                t = ts.peek()
                if t == "<eof>":
                    raise ParseError("unclosed '['", ts.pos)
                if t == "[":
                    depth += 1
                elif t == "]":
                    if depth == 0:
                        break
                    depth -= 1
                ts.next()
            end = ts.i
            ts.next()
            pos = ts.pos
            lab = ts.next()
            try:
                w = parse_label(lab)
            except ValueError:
                raise ParseError(f"bad label {lab!r}", pos) from None
            if w == ROOT:
                raise ParseError("w0 is reserved for the root", pos)
            after = ts.i
            ts.i = start
            kid = _node(ts, w)
            if ts.i != end:
                raise ParseError(f"unexpected {ts.peek()!r}", ts.pos)
            ts.i = after
            kids.append(kid)
        else:
            ts.arity = {}  # arities are checked per formula
            f = ts.formula()
            ts.expect("^")
            pos = ts.pos
            p = ts.next()
            if p not in ("i", "o"):
                raise ParseError(f"expected polarity i or o, found {p!r}", pos)
            forms.append(PF(f, Pol(p)))
        if ts.peek() != ",":
            break
        ts.next()
    return Node(label, tuple(sig), tuple(forms), tuple(kids))


def to_json(s: Node) -> dict:
    return {
        "sig": list(s.sig),
        "in": [F.show(f) for f in s.inputs],
        "out": [F.show(f) for f in s.outputs],
        "kids": [{"label": label_name(c.label), "node": to_json(c)} for c in s.children],
    }


def from_json(d: dict, label: int = ROOT) -> Node:
    forms = [inp(x) for x in d.get("in", [])] + [out(x) for x in d.get("out", [])]
    kids = [from_json(k["node"], parse_label(k["label"])) for k in d.get("kids", [])]
    return Node(label, tuple(d.get("sig", [])), tuple(forms), tuple(kids))


def dumps(s: Node) -> str:
    return json.dumps(to_json(s))


def sequent_of_formula(f: Formula) -> Node:
    """X; f^o with X the free variables of f."""
    return Node(ROOT, tuple(sorted(F.free_vars(f))), (PF(f, OUT),))


def multiset(s: Node, w: int) -> Counter:
    return Counter(p.key for p in s.find(w).forms)
