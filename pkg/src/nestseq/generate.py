"""Seeded random formulas and derivations with cuts, for fuzzing and benchmarks."""

from __future__ import annotations

import random

from . import calculus as C
from . import formula as F
from . import sequent as S
from .calculus import Calculus, Params
from .derivation import Derivation
from .formula import Formula
from .prover import Budget, prove
from .sequent import Node


def random_formula(
    rng: random.Random,
    complexity: int,
    atoms=("p", "q"),
    preds=(),
    free=(),
    quantifiers: bool = False,
    bottom: bool = True,
) -> Formula:
    """A formula with exactly ``complexity`` connectives and quantifiers.

    Atoms are drawn from ``atoms`` (0-ary) and ``preds`` (unary, applied to a
    variable in scope or in ``free``).  Bound variables are named x0, x1, ...
    """

    def leaf(scope):
        options = [F.Atom(a) for a in atoms]
        vs = list(scope) + list(free)
        if vs:
            options += [F.Atom(p, (v,)) for p in preds for v in vs]
        if bottom:
            options.append(F.BOT)
        return rng.choice(options)

    def go(n, scope):
        if n == 0:
            return leaf(scope)
        kinds = ["and", "or", "imp"] + (["all", "ex"] if quantifiers else [])
        k = rng.choice(kinds)
        if k in ("all", "ex"):
            x = f"x{len(scope)}"
            body = go(n - 1, scope + (x,))
            return F.Forall(x, body) if k == "all" else F.Exists(x, body)
        left = rng.randint(0, n - 1)
        a, b = go(left, scope), go(n - 1 - left, scope)
        return {"and": F.And, "or": F.Or, "imp": F.Imp}[k](a, b)

    return go(complexity, ())


def random_prop(rng: random.Random, max_complexity: int = 5, atoms=("p", "q")) -> Formula:
    return random_formula(rng, rng.randint(0, max_complexity), atoms)


# ----------------------------------------------------------- cut builders


def _proof(s: Node, calc: Calculus, budget: Budget) -> Derivation | None:
    r = prove(s, calc, budget)
    return r.derivation if r.status == "proved" else None


def _cut_formula(rng: random.Random, s: Node, w: int, calc: Calculus, max_complexity: int) -> Formula:
    # prefer subformulas of the sequent so both premises tend to be provable
    pool = [g for n in s.nodes() for pf in n.forms for g in F.subformulas(pf.formula)]
    avail = set(S.available_vars(s, w))
    pool = [g for g in pool if F.complexity(g) <= max_complexity and F.free_vars(g) <= avail]
    if pool and rng.random() < 0.6:
        base = rng.choice(pool)
        if rng.random() < 0.5 or F.complexity(base) >= max_complexity:
            return base
        other = random_formula(rng, 0, ("p", "q"))
        return rng.choice([F.And, F.Or, F.Imp])(base, other)
    fo = calc.first_order
    return random_formula(
        rng,
        rng.randint(1, max_complexity),
        ("p", "q"),
        preds=("P",) if fo else (),
        free=tuple(sorted(avail)),
        quantifiers=fo,
    )


def with_cuts(
    rng: random.Random,
    s: Node,
    calc: Calculus,
    n_cuts: int,
    max_complexity: int = 4,
    budget: Budget | None = None,
    tries: int = 40,
) -> Derivation | None:
    """A derivation of s containing exactly n_cuts cuts, or None if none was found.

    Each cut is placed at a random label with a formula of complexity at most
    ``max_complexity``; premises are proved by search (or by further cuts).
    """
    budget = budget or Budget(max_rounds=12, max_size=400, max_branches=300)
    cc = calc.with_cut()
    if n_cuts == 0:
        return _proof(s, calc, budget)
    for _ in range(tries):
        w = rng.choice(s.labels())
        f = _cut_formula(rng, s, w, calc, max_complexity)
        if F.complexity(f) > max_complexity:
            continue
        inst = C.build(C.CUT, s, Params(w=w, formula=f), cc)
        left_n = rng.randint(0, n_cuts - 1)
        kids = []
        for prem, k in zip(inst.premises, (left_n, n_cuts - 1 - left_n)):
            d = with_cuts(rng, prem, calc, k, max_complexity, budget, max(1, tries // 4)) if k else _proof(prem, calc, budget)
            if d is None:
                break
            kids.append(d)
        if len(kids) == 2:
            return Derivation(inst, tuple(kids))
    return None


def cut_goals(calc: Calculus) -> list[Node]:
    """Sequents used as roots for constructed cut derivations."""
    texts = [
        "(p -> q) -> (q -> r) -> p -> r",
        "p & q -> q & p",
        "(p | q) & (p -> r) & (q -> r) -> r",
        "((p -> q) -> p) -> (p -> q) -> q",
        "(p -> q -> r) -> p & q -> r",
        "p -> ((p -> q) -> q)",
        "(p | q) -> (q | p)",
        "bot -> p & q",
    ]
    if calc.first_order:
        texts += [
            "(forall x. P(x)) -> P(y)",
            "(forall x. (P(x) -> q)) -> (exists x. P(x)) -> q",
            "(forall x. (P(x) & q)) -> (forall x. P(x)) & q",
            "(exists x. (P(x) & q)) -> q",
            "(forall x. P(x)) -> exists x. P(x)",
            "(exists x. forall x1. P(x1)) -> forall x. P(x)",
        ]
    return [S.sequent_of_formula(F.parse(t)) for t in texts]


def cut_corpus(calc: Calculus, count: int, seed: int = 0, max_cuts: int = 3, max_complexity: int = 4) -> list[Derivation]:
    """``count`` derivations with 1..max_cuts cuts over ``cut_goals``."""
    rng = random.Random(seed)
    goals = cut_goals(calc)
    out: list[Derivation] = []
    attempts = 0
    while len(out) < count and attempts < count * 20:
        attempts += 1
        s = rng.choice(goals)
        if calc.first_order:
            fv = sorted({x for n in s.nodes() for pf in n.forms for x in F.free_vars(pf.formula)})
            s = S.update_at(s, S.ROOT, lambda n: n.add(sig=fv or ["z"]))
        d = with_cuts(rng, s, calc, rng.randint(1, max_cuts), max_complexity)
        if d is not None:
            out.append(d)
    return out

