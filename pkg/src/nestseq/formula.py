"""First-order formulas without function symbols or equality.

Variables are plain strings.  Names containing a double underscore
(``x__3``) are reserved for machine-generated variables: bound-variable
renaming during substitution and eigenvariables of the prover.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

TOP_ATOM = "p0"  # reserved 0-ary predicate behind ``top``
KEYWORDS = {"forall", "exists", "bot", "top"}


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[str, ...] = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self):
        return show(self)


Formula = Union[Atom, Bottom, Or, And, Imp, Exists, Forall]
Binary = (Or, And, Imp)
Quant = (Exists, Forall)

BOT = Bottom()
TOP = Imp(Atom(TOP_ATOM), Atom(TOP_ATOM))


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------- queries


@lru_cache(maxsize=None)
def complexity(f: Formula) -> int:
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, Binary):
        return complexity(f.left) + complexity(f.right) + 1
    return complexity(f.body) + 1


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Binary):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def all_vars(f: Formula) -> set[str]:
    """Free and bound variable names."""
    if isinstance(f, Atom):
        return set(f.args)
    if isinstance(f, Bottom):
        return set()
    if isinstance(f, Binary):
        return all_vars(f.left) | all_vars(f.right)
    return all_vars(f.body) | {f.var}


def predicates(f: Formula) -> dict[str, int]:
    out: dict[str, int] = {}
    for a in atoms(f):
        out[a.pred] = len(a.args)
    return out


def atoms(f: Formula) -> Iterable[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Binary):
        yield from atoms(f.left)
        yield from atoms(f.right)
    elif isinstance(f, Quant):
        yield from atoms(f.body)


def is_propositional(f: Formula) -> bool:
    if isinstance(f, Atom):
        return not f.args
    if isinstance(f, Bottom):
        return True
    if isinstance(f, Binary):
        return is_propositional(f.left) and is_propositional(f.right)
    return False


def subformulas(f: Formula) -> Iterable[Formula]:
    yield f
    if isinstance(f, Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Quant):
        yield from subformulas(f.body)


# ---------------------------------------------------------- substitution

_RESERVED = re.compile(r"^(.*?)__(\d+)$")


def base_name(x: str) -> str:
    m = _RESERVED.match(x)
    return m.group(1) if m else x


def fresh_name(x: str, avoid) -> str:
    """Smallest reserved variant ``base__k`` of x not in avoid."""
    base = base_name(x)
    k = 1
    while f"{base}__{k}" in avoid:
        k += 1
    return f"{base}__{k}"


@lru_cache(maxsize=200_000)
def substitute(f: Formula, y: str, x: str) -> Formula:
    """f(y/x): replace free x by y, renaming bound variables that would capture y."""
    if x == y or x not in free_vars(f):
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(y if a == x else a for a in f.args))
    if isinstance(f, Binary):
        return type(f)(substitute(f.left, y, x), substitute(f.right, y, x))
    var, body = f.var, f.body
    if var == y:
        new = fresh_name(var, all_vars(body) | {x, y})
        body = substitute(body, new, var)
        var = new
    return type(f)(var, substitute(body, y, x))


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    for x, y in mapping.items():
        f = substitute(f, y, x)
    return f


@lru_cache(maxsize=200_000)
def alpha_key(f: Formula) -> str:
    """Canonical string, identical exactly for alpha-equivalent formulas."""
    return _key(f, ())


def _key(f: Formula, bound: tuple[str, ...]) -> str:
    if isinstance(f, Atom):
        args = []
        for a in f.args:
            if a in bound:
                args.append(f"#{_db(a, bound)}")
            else:
                args.append(a)
        return f"{f.pred}({','.join(args)})" if args else f.pred
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, Binary):
        op = {Or: "|", And: "&", Imp: ">"}[type(f)]
        return f"({_key(f.left, bound)}{op}{_key(f.right, bound)})"
    q = "A" if isinstance(f, Forall) else "E"
    return f"{q}.{_key(f.body, bound + (f.var,))}"


def _db(a: str, bound: tuple[str, ...]) -> int:
    for i in range(len(bound) - 1, -1, -1):
        if bound[i] == a:
            return len(bound) - 1 - i
    raise ValueError(a)


def alpha_eq(f: Formula, g: Formula) -> bool:
    return alpha_key(f) == alpha_key(g)


# --------------------------------------------------------------- printing

_PREC = {Imp: 1, Or: 2, And: 3}


def show(f: Formula) -> str:
    return _show(f, 0)


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f"{f.pred}({','.join(f.args)})" if f.args else f.pred
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, Quant):
        q = "forall" if isinstance(f, Forall) else "exists"
        s = f"{q} {f.var}. {_show(f.body, 4)}"
        return f"({s})" if ctx > 0 and ctx < 4 else s
    p = _PREC[type(f)]
    op = {Imp: "->", Or: "|", And: "&"}[type(f)]
    if isinstance(f, Imp):
        s = f"{_show(f.left, p + 1)} {op} {_show(f.right, p)}"
    else:
        # left-associative chains print flat, right nesting gets brackets
        s = f"{_show(f.left, p)} {op} {_show(f.right, p + 1)}"
    return f"({s})" if ctx > p else s


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(->)|([|&().,;\[\]^\-])|([A-Za-z][A-Za-z0-9_]*))")


def tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        tok = m.group(1) or m.group(2) or m.group(3)
        toks.append((tok, m.start(m.lastindex)))
        i = m.end()
    toks.append(("<eof>", n))
    return toks


class TokenStream:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.arity: dict[str, int] = {}

    def peek(self, k=0) -> str:
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    @property
    def pos(self) -> int:
        return self.toks[self.i][1]

    def next(self) -> str:
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.pos)
        self.next()

    def ident(self, what="identifier") -> str:
        tok = self.peek()
        if not re.match(r"[A-Za-z]", tok) or tok in KEYWORDS:
            raise ParseError(f"expected {what}, found {tok!r}", self.pos)
        self.next()
        return tok

    # formula := imp ; imp := or ("->" imp)?
    def formula(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.next()
            return Imp(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in ("forall", "exists"):
            self.next()
            var = self.ident("variable")
            self.expect(".")
            body = self.unary()
            return Forall(var, body) if tok == "forall" else Exists(var, body)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok == "bot":
            self.next()
            return BOT
        if tok == "top":
            self.next()
            self._check_arity(TOP_ATOM, 0, self.pos)
            return TOP
        if tok == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        pos = self.pos
        pred = self.ident("formula")
        args: list[str] = []
        if self.peek() == "(":
            self.next()
            args.append(self.ident("variable"))
            while self.peek() == ",":
                self.next()
                args.append(self.ident("variable"))
            self.expect(")")
        self._check_arity(pred, len(args), pos)
        return Atom(pred, tuple(args))

    def _check_arity(self, pred: str, n: int, pos: int):
        old = self.arity.setdefault(pred, n)
        if old != n:
            raise ParseError(f"predicate {pred} used with arity {n} and {old}", pos)


def parse(text: str) -> Formula:
    ts = TokenStream(text)
    f = ts.formula()
    if ts.peek() != "<eof>":
        raise ParseError(f"unexpected {ts.peek()!r}", ts.pos)
    return f


def conj(fs: list[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is top."""
    if not fs:
        return TOP
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(fs: list[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is bot."""
    if not fs:
        return BOT
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out
